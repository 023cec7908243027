"""Bundled example presentations and map files."""

from importlib import resources


def fixture_path(name: str):
    """Path of a bundled file; ``name`` may omit the ``.sol`` suffix."""
    if "." not in name:
        name += ".sol"
    return resources.files(__name__) / name


def load_fixture(name: str):
    from ..presentation import parse_presentation

    return parse_presentation(fixture_path(name).read_bytes())


def names() -> list[str]:
    return sorted(p.name[:-4] for p in resources.files(__name__).iterdir() if p.name.endswith(".sol"))
