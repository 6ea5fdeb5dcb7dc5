"""
DualGraphLens FastAPI Service
Equivalence of resolution dual graphs, blow-up calculus and valuations over HTTP
"""

import logging
from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from slowapi import Limiter, _rate_limit_exceeded_handler
from slowapi.errors import RateLimitExceeded
from slowapi.util import get_remote_address

from app.api.routes import graphs, health, resolution, valuations
from app.core.config import settings
from app.core.errors import DualGraphError
from app.models.schemas import ErrorResponse

logger = logging.getLogger(__name__)

# Create rate limiter
limiter = Limiter(key_func=get_remote_address)

# Create FastAPI app
app = FastAPI(
    title="DualGraphLens API",
    description="Decide equivalence of resolution dual graphs, run blow-up scripts and evaluate valuations",
    version=settings.VERSION,
    docs_url="/docs",
    redoc_url="/redoc",
)

# Add rate limiting
app.state.limiter = limiter
app.add_exception_handler(RateLimitExceeded, _rate_limit_exceeded_handler)  # type: ignore[arg-type]


@app.exception_handler(DualGraphError)
async def dual_graph_error_handler(request: Request, exc: DualGraphError) -> JSONResponse:
    logger.info("Rejected %s: %s", request.url.path, exc)
    return JSONResponse(
        status_code=400,
        content=ErrorResponse(error=type(exc).__name__, details=str(exc), code=400).model_dump(),
    )


# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.ALLOWED_ORIGINS,
    allow_credentials=True,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

app.include_router(health.router, tags=["health"])
app.include_router(graphs.router, prefix="/graphs", tags=["graphs"])
app.include_router(resolution.router, prefix="/resolution", tags=["resolution"])
app.include_router(valuations.router, prefix="/valuations", tags=["valuations"])


@app.get("/")
async def root() -> dict[str, Any]:
    """Root endpoint"""
    return {
        "service": settings.PROJECT_NAME,
        "description": "Resolution dual graph equivalence service",
        "version": settings.VERSION,
        "status": "running",
        "endpoints": {
            "health": "/health",
            "graphs": "/graphs",
            "resolution": "/resolution",
            "valuations": "/valuations",
        },
    }


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("app.main:app", host="0.0.0.0", port=8000, reload=settings.DEBUG)
