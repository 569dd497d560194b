import pytest

from sevdel.groups import setup


@pytest.fixture(scope="session")
def toy_params():
    return setup("toy", sector_bits=16)


@pytest.fixture(scope="session")
def toy_params32():
    return setup("toy", sector_bits=32)


@pytest.fixture(scope="session")
def bn_params():
    return setup("bn254", sector_bits=8)


@pytest.fixture(scope="session", params=["toy", "bn254"])
def any_params(request, toy_params, bn_params):
    return toy_params if request.param == "toy" else bn_params
