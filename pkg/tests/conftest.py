"""Shared test fixtures: golden sample documents from tests/data."""

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


def read_data(name: str) -> str:
    return (DATA_DIR / name).read_text("utf-8")


@pytest.fixture
def golden_project_text() -> str:
    return read_data("project_e015.rdf")


@pytest.fixture
def golden_person_text() -> str:
    return read_data("person_273.rdf")


@pytest.fixture
def golden_orgunit_text() -> str:
    return read_data("orgunit_auseninstitut.rdf")


@pytest.fixture
def fodok_text() -> str:
    return read_data("fodok_record.sgml")


@pytest.fixture
def html_page_bytes() -> bytes:
    return (DATA_DIR / "auris_page.html").read_bytes()
