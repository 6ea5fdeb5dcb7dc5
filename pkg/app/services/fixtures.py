"""
Fixture corpus: named graph files grouped by a corpus.json manifest
"""

import logging
from dataclasses import dataclass
from pathlib import Path

from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import DualGraphError, FixtureError
from app.models.schemas import CorpusManifest
from app.services.graph_io import LoadedGraph, read_graph

logger = logging.getLogger(__name__)

MANIFEST = "corpus.json"


@dataclass(frozen=True)
class Fixture:
    name: str
    group: str
    path: Path
    loaded: LoadedGraph


class FixtureCorpus:
    """Loads and indexes the fixture corpus of a directory"""

    def __init__(self, directory: Path | None = None) -> None:
        self.directory = Path(directory) if directory is not None else settings.fixtures_path()
        self._groups: dict[str, list[Fixture]] | None = None

    def _load(self) -> dict[str, list[Fixture]]:
        manifest_path = self.directory / MANIFEST
        try:
            manifest = CorpusManifest.model_validate_json(manifest_path.read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise FixtureError(f"no {MANIFEST} in {self.directory}") from e
        except ValidationError as e:
            raise FixtureError(f"invalid {manifest_path}: {e.errors()[0]['msg']}") from e

        groups: dict[str, list[Fixture]] = {}
        for group, files in manifest.groups.items():
            fixtures = []
            for filename in files:
                path = self.directory / filename
                try:
                    loaded = read_graph(path)
                except FileNotFoundError as e:
                    raise FixtureError(f"fixture {filename} listed in {MANIFEST} is missing") from e
                except DualGraphError as e:
                    raise FixtureError(f"fixture {filename}: {e}") from e
                fixtures.append(Fixture(Path(filename).stem, group, path, loaded))
            groups[group] = fixtures
        logger.info(
            "Loaded %d fixtures in %d groups from %s",
            sum(len(f) for f in groups.values()),
            len(groups),
            self.directory,
        )
        return groups

    @property
    def groups(self) -> dict[str, list[Fixture]]:
        if self._groups is None:
            self._groups = self._load()
        return self._groups

    def group(self, name: str) -> list[Fixture]:
        if name not in self.groups:
            raise FixtureError(f"no fixture group {name!r}")
        return self.groups[name]

    def get(self, name: str) -> Fixture:
        for fixtures in self.groups.values():
            for fixture in fixtures:
                if fixture.name == name:
                    return fixture
        raise FixtureError(f"no fixture named {name!r}")

    def all(self) -> list[Fixture]:
        return [f for fixtures in self.groups.values() for f in fixtures]
