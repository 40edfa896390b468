from __future__ import annotations

import json
import os
import shutil

import pytest

from csp2c.xcsp import parse_file

CORPUS_DIR = os.path.join(os.path.dirname(__file__), "corpus")
GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


def corpus_path(kind: str, name: str) -> str:
    return os.path.join(CORPUS_DIR, kind, f"{name}.xml")


def load_corpus(name: str):
    return parse_file(corpus_path("valid", name))


@pytest.fixture(scope="session")
def manifest() -> dict:
    with open(os.path.join(CORPUS_DIR, "manifest.json"), "r", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def cc_template() -> str:
    if shutil.which("cc") is None:
        pytest.skip("no system C compiler available")
    return os.environ.get("CSP2C_CC", "cc -O1 -o {out} {src}")
