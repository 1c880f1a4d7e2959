"""Location of bundled data files, overridable via LIQGAME_FIXTURES."""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path


def fixture_path(name: str) -> Path:
    override = os.environ.get("LIQGAME_FIXTURES")
    if override:
        return Path(override) / name
    return Path(str(resources.files("liqgame") / "fixtures" / name))
