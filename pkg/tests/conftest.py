import pathlib

import pytest

from alloyblocks import parse_model
from alloyblocks.editing import EditSession

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

TRASH_TEXT = (FIXTURES / "trash.als").read_text()
TRASH_EMPTY_TEXT = (FIXTURES / "trash_empty.als").read_text()


@pytest.fixture
def trash_model():
    return parse_model(TRASH_TEXT)


@pytest.fixture
def trash_empty():
    return parse_model(TRASH_EMPTY_TEXT)


@pytest.fixture
def empty_session():
    return EditSession(parse_model(TRASH_EMPTY_TEXT))


def fixture_path(name: str) -> pathlib.Path:
    return FIXTURES / name


def roundtrip_paths():
    return sorted((FIXTURES / "roundtrip").glob("*.als"))
