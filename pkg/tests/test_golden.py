"""Hand-transcribed golden modules against the library."""

import importlib.util
from pathlib import Path

import pytest

from peculiar.selftest import GOLDEN_NAMES, golden_text, library_golden


def load_transcriber():
    path = Path(__file__).parent / "golden" / "transcribe.py"
    spec = importlib.util.spec_from_file_location("transcribe", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def test_transcription_script_reproduces_the_shipped_files():
    pics = load_transcriber().pictures()
    assert sorted(pics) == sorted(GOLDEN_NAMES)
    for name, text in pics.items():
        assert text == golden_text(name), name


@pytest.mark.parametrize("name", GOLDEN_NAMES)
def test_library_matches_golden(name):
    assert library_golden(name) == golden_text(name)
