import pytest
from hypothesis import strategies as st

from k3fm.lattice import MukaiVector, PicardLattice
from k3fm.reflexive import ReflexiveSurface, generic_surface

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def surface():
    return generic_surface()


@pytest.fixture(scope="session")
def nodal_surface():
    """Reflexive rank 3 lattice that also carries a degree 1 nodal class."""
    return ReflexiveSurface.from_gram([[2, 0, 1], [0, -12, 0], [1, 0, -2]], (1, 0, 0), (0, 1, 0))


def mukai_vectors(lattice: PicardLattice, bound: int = 100):
    ints = st.integers(-bound, bound)
    return st.builds(
        lambda r, c, s: MukaiVector(r, lattice.cls(tuple(c)), s),
        ints,
        st.lists(ints, min_size=lattice.rank, max_size=lattice.rank),
        ints,
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
