"""
Health check endpoints
"""

import logging
import time

from fastapi import APIRouter

from app.core.config import settings
from app.models.schemas import HealthResponse
from app.services.fixtures import FixtureCorpus, FixtureError

router = APIRouter()
logger = logging.getLogger(__name__)

# Application start time for uptime calculation
START_TIME = time.time()

_corpus = FixtureCorpus()


def corpus_size() -> int | None:
    try:
        return len(_corpus.all())
    except FixtureError as e:
        logger.warning("Fixture corpus unavailable: %s", e)
        return None


@router.get("/health", response_model=HealthResponse)
async def health_check() -> HealthResponse:
    """Health check endpoint; degraded when the fixture corpus cannot be read"""
    size = corpus_size()
    return HealthResponse(
        status="healthy" if size is not None else "degraded",
        version=settings.VERSION,
        uptime=time.time() - START_TIME,
        fixtures=size or 0,
        isomorphism_max_vertices=settings.ISOMORPHISM_MAX_VERTICES,
    )
