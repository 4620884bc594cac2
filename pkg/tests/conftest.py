from __future__ import annotations

import json
from pathlib import Path

import pytest

from drlint.parser import SourceUnit
from drlint.rules import builtin_catalog, load_rules

REPO_ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = REPO_ROOT / "corpus"
GOLDEN_DIR = REPO_ROOT / "tests" / "golden"


def load_manifest() -> list[dict]:
    return json.loads((CORPUS_DIR / "manifest.json").read_text())["entries"]


def fixture_source(rel_path: str) -> SourceUnit:
    # Paths are kept repo-relative so reports (and goldens) are stable.
    path = CORPUS_DIR / rel_path
    return SourceUnit(f"corpus/{rel_path}", path.read_text(encoding="utf-8"))


def clean_source() -> SourceUnit:
    return fixture_source("clean/dqn_cartpole.py")


@pytest.fixture(scope="session")
def catalog_rules():
    return load_rules(builtin_catalog())


@pytest.fixture(scope="session")
def manifest_entries():
    return load_manifest()
