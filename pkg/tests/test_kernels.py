import numpy as np
import pytest

from qflimit import kernels
from qflimit.ensembles import EnsembleSpec, generate
from qflimit.graph import from_edge_list

BACKENDS = kernels.backends()


def test_backend_selected():
    assert kernels.BACKEND in BACKENDS
    assert kernels.edge_quadratic is BACKENDS[kernels.BACKEND][0]


@pytest.mark.parametrize("name", sorted(BACKENDS))
@pytest.mark.parametrize("reps", [1, 15, 16, 17, 40])
def test_edge_quadratic_against_loop(name, reps):
    g = generate(EnsembleSpec("er", {"n": 35, "p": 0.2}, seed=reps))
    X = np.random.default_rng(reps).standard_normal((reps, g.n))
    want = np.array([sum(x[u - 1] * x[v - 1] for u, v in g.edges()) for x in X])
    got = BACKENDS[name][0](X, *g.upper_csr)
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_codegree_sums_k4(name, k4):
    indptr, indices = k4.csr
    # every pair in K4 has codegree 2
    assert tuple(BACKENDS[name][1](indptr, indices, 4)) == (6, 24, 12)


def test_backends_agree():
    g = generate(EnsembleSpec("sbm", {"n": 120, "p": 0.3, "q": 0.05}, seed=3))
    X = np.random.default_rng(0).standard_normal((33, g.n))
    results = [fn(X, *g.upper_csr) for fn, _ in BACKENDS.values()]
    sums = [tuple(cs(*g.csr, g.n)) for _, cs in BACKENDS.values()]
    for r in results[1:]:
        np.testing.assert_allclose(r, results[0], rtol=1e-12)
    assert len(set(sums)) == 1


def test_edge_free_rows():
    g = from_edge_list([(1, 2)], n=3)
    X = np.ones((2, 3))
    for fn, _ in BACKENDS.values():
        np.testing.assert_array_equal(fn(X, *g.upper_csr), [1.0, 1.0])
