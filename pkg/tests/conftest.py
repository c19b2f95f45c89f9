import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from maltsev_kit.algebra import parse_term  # noqa: E402
from maltsev_kit.corpus import builtin  # noqa: E402
from maltsev_kit.maltsev import LATTICE_MAJORITY, majority_chain  # noqa: E402

SMALL = ["trivial", "lattice2", "chain3-lattice", "semilattice2", "chain3-semilattice",
         "set2", "set3", "set4", "z2", "d01-majority"]
LATTICES = ["lattice2", "chain3-lattice", "N5", "M3"]


@pytest.fixture(scope="session")
def algebra():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = builtin(name)
        return cache[name]
    return get


def lattice_chain(A):
    return majority_chain(A, parse_term(LATTICE_MAJORITY))
