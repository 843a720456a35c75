import pytest

from fracsob import kernels
from fracsob.generators import lattice_box, path_graph, vicsek
from fracsob.graph import build_graph


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    return kernels.BACKENDS[request.param]


@pytest.fixture(scope="session")
def long_path():
    """Path on 401 vertices; vertex 200 plays the origin of Z."""
    return path_graph(401)


@pytest.fixture(scope="session")
def v2_3():
    return vicsek(2, 3)


@pytest.fixture(scope="session")
def v2_4():
    return vicsek(2, 4)


@pytest.fixture(scope="session")
def v2_6():
    return vicsek(2, 6)


@pytest.fixture(scope="session")
def grid():
    return lattice_box(2, 9)


@pytest.fixture
def single_edge():
    return build_graph([(0, 1, 1.0)])


@pytest.fixture
def path3():
    return build_graph([(0, 1, 1.0), (1, 2, 1.0)])
