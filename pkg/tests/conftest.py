import pytest

from lgkit.corpus import corpus_generate
from lgkit.triangle import (
    TriangleParams,
    build_dense_lg,
    build_sparse_lg,
    build_sparsenew_lg,
    triangle_function,
)


@pytest.fixture(scope="session")
def tri4():
    return triangle_function(4)


@pytest.fixture(scope="session")
def dense4():
    return build_dense_lg(4, TriangleParams(1, 2, 2, "dense"))


@pytest.fixture(scope="session")
def sparse4():
    return build_sparse_lg(4, TriangleParams(1, 2, 2, "sparse"))


@pytest.fixture(scope="session")
def anchored4():
    return build_sparsenew_lg(4, 2)


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    corpus_generate(root, seed=0, sizes=(5, 6, 8), samples=12)
    return root
