import pytest

from skirent.generators import classic_two_option, geometric_options


@pytest.fixture
def classic4():
    return classic_two_option(4)


@pytest.fixture
def geometric():
    return geometric_options(2, 4)
