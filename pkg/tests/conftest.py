import pytest

from narql.testkit import load_fixture


@pytest.fixture(scope="session")
def obama_store():
    return load_fixture("obama")


@pytest.fixture(scope="session")
def cvst_store():
    return load_fixture("cvst")


@pytest.fixture(scope="session")
def smith_store():
    return load_fixture("smith")


@pytest.fixture(scope="session")
def demo_store():
    return load_fixture("demo_covid")
