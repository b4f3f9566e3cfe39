from pathlib import Path

import pytest

from cvmkit import datasets
from cvmkit.regression import fit_hierarchy
from cvmkit.survey import split_by_supplier

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def tree():
    return datasets.automobile_tree()


@pytest.fixture(scope="session")
def sample():
    return datasets.market_survey()


@pytest.fixture(scope="session")
def halves(sample):
    """(own, competitors) split of the bundled survey."""
    return split_by_supplier(sample)


@pytest.fixture(scope="session")
def hierarchy(sample, tree):
    return fit_hierarchy(sample, tree)
