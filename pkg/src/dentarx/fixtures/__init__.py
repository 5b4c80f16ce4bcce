"""Bundled fixture data: a mini knowledge graph, an abbreviation table and a
handful of demo records. All values are illustrative engineering data."""

from importlib import resources
from pathlib import Path


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled fixture file."""
    return Path(resources.files(__package__) / name)
