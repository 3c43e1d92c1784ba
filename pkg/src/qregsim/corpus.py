"""Bundled ``.qreg`` experiment files."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .dsl import parse_experiment
from .rewrite import ExperimentProgram

NAMES = (
    "stern_gerlach",
    "wollaston",
    "double_sg",
    "mach_zender",
    "povm_interference",
    "epr",
    "hsz",
    "independent_pair",
)


def source(name: str) -> str:
    if name not in NAMES:
        raise KeyError(f"no bundled experiment named {name!r}; choose from {', '.join(NAMES)}")
    return resources.files(__package__).joinpath("experiments", f"{name}.qreg").read_text(encoding="utf-8")


def load(name: str, overrides=None) -> ExperimentProgram:
    return parse_experiment(source(name), overrides)


def read_text(ref: str) -> str:
    """Contents of a file path, or of a bundled experiment given by bare name."""
    path = Path(ref)
    if path.exists():
        return path.read_text(encoding="utf-8")
    if ref in NAMES:
        return source(ref)
    raise FileNotFoundError(f"{ref}: no such file or bundled experiment")
