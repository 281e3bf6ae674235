import random

import pytest
from hypothesis import strategies as st

from cylalg.space import CylSpace, PointSet
from cylalg.terms import ONE, ZERO, Complement, Cyl, Diag, Product, Sum, SymDiff, Var


def terms(dim=3, names=("x", "y"), max_leaves=12):
    """Hypothesis strategy for terms with indices < dim."""
    idx = st.integers(0, dim - 1)
    leaves = st.one_of(
        st.sampled_from([Var(n) for n in names]),
        st.sampled_from([ZERO, ONE]),
        st.builds(Diag, idx, idx),
    )

    def extend(inner):
        return st.one_of(
            st.builds(Complement, inner),
            st.builds(Cyl, idx, inner),
            st.builds(Sum, inner, inner),
            st.builds(Product, inner, inner),
            st.builds(SymDiff, inner, inner),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def subsets(space):
    return st.integers(0, space.full).map(lambda b: PointSet(space, b))


def random_set(space, rng, density=0.5):
    return PointSet(space, space.random_element(rng, density))


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(scope="session")
def s32():
    return CylSpace(3, 2)


@pytest.fixture(scope="session")
def s33():
    return CylSpace(3, 3)
