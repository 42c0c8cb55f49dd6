"""Access to the lexicon files and fixtures shipped inside the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def data_path(name: str) -> Path:
    return Path(str(resources.files("legal_deid").joinpath("data", name)))


def read_lines(path: str | Path) -> list[str]:
    """Nonblank lines of a UTF-8 list file, ``#`` comment lines dropped."""
    out = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out
