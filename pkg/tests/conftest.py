import pytest

from starklab.ball import set_working_precision


@pytest.fixture(autouse=True)
def _default_precision():
    set_working_precision(128)
    yield
