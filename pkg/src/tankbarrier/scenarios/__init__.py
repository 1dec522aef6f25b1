"""Bundled scenario files: the three validation replicas and test rigs."""

from importlib import resources

from ..scenario import validate_scenario
import json

__all__ = ["builtin_names", "builtin_scenario"]


def builtin_names():
    """Names of the bundled scenario files (without extension)."""
    names = []
    for entry in resources.files(__package__).iterdir():
        if entry.name.endswith(".json"):
            names.append(entry.name[: -len(".json")])
    return sorted(names)


def builtin_scenario(name):
    """Load and validate a bundled scenario by name."""
    path = resources.files(__package__) / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"no bundled scenario named {name!r}; " f"have {builtin_names()}")
    return validate_scenario(json.loads(path.read_text(encoding="utf-8")))
