import warnings

import pytest


@pytest.fixture(autouse=True)
def _quiet_partial_path_warnings():
    # finite-epsilon stagewise runs legitimately end at their budget
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*budget exhausted.*")
        yield
