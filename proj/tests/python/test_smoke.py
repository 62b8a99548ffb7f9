import math

import numpy as np
import pytest

import klslab


def test_density_and_sampling():
    g = klslab.Density.gaussian(np.zeros(2), np.eye(2))
    assert np.allclose(g.covariance(), np.eye(2))
    atoms = klslab.sample_atomic(g, 5000, 7)
    assert atoms.points.shape == (5000, 2)
    assert math.isclose(atoms.weights.sum(), 1.0, abs_tol=1e-12)
    again = klslab.sample_atomic(g, 5000, 7)
    assert np.array_equal(atoms.points, again.points)


def test_simulate_path_conjugacy_direction():
    g = klslab.Density.gaussian(np.zeros(2), np.eye(2))
    atoms = klslab.sample_atomic(g, 20000, 11)
    opts = klslab.SimulateOptions()
    opts.record_every = 10
    path = klslab.simulate_path(atoms, 3, 0.5, 0.005, 13, opts)
    final = path.records[-1]
    assert final.t == pytest.approx(0.5)
    # localized covariance contracts roughly like A / (1 + t)
    assert np.linalg.norm(final.cov - np.eye(2) / 1.5, 2) < 0.15
    assert final.gamma < 2.0


def test_hard_gates_and_errors():
    rng = np.random.default_rng(3)
    f = rng.normal(size=(3, 3))
    f = f + f.T
    root = rng.normal(size=(3, 3))
    g = root @ root.T
    check = klslab.check_trace_inequality(g, f, 0.3)
    assert check.passed
    assert check.lhs <= check.rhs + 1e-9

    with pytest.raises(klslab.KlslabError):
        klslab.kls_original_bound(np.diag([1.0, -1.0]))


def test_bounds_surface():
    assert klslab.kls_original_bound(np.eye(4)) == pytest.approx(math.log(2) / 2)
    assert klslab.lee_vempala_bound(np.eye(16)) == pytest.approx(0.5)
    opt = klslab.optimal_ell(1e6)
    assert opt.formula_ell == 3
    seq = klslab.recursion_sequences(100, 1.0)
    assert seq.beta[1] == 31.0 / 64.0
    tc = klslab.time_constants(100.0, 4.0, 0.5)
    assert tc.q == 3
    assert tc.identity_residual < 1e-12


def test_isoperimetry_surface():
    g = klslab.Density.gaussian(np.zeros(2), np.eye(2))
    est = klslab.halfspace_isoperimetry(g, 16, [-1.0, 0.0, 1.0], 5)
    assert est.value == pytest.approx(math.sqrt(2 / math.pi), rel=0.02)
    cloud = klslab.sample_atomic(g, 400, 9)
    proxy = klslab.conductance_proxy(cloud, 10, 20)
    assert 0.1 < proxy.value < 3.0
