import math

import numpy as np
import pytest

import bosetrap as bt


def default_system(e_cut=20.0, lam=0.01):
    cfg = bt.TrapConfig()
    basis = bt.enumerate_basis(cfg, e_cut)
    return cfg, basis, bt.build_matrices_at_lambda(basis, cfg, lam)


def test_basis_and_coefficients():
    cfg = bt.TrapConfig()
    basis = bt.enumerate_basis(cfg, 5.0)
    assert basis.states == [[1], [2], [3], [4], [5]]
    assert np.allclose(basis.energies, [1, 2, 3, 4, 5])
    assert bt.coupling_coefficient([1], [2], cfg) == 0.0
    assert bt.coupling_coefficient([0], [0], cfg) > 0.0
    assert bt.source_coefficient([2], cfg) == bt.coupling_coefficient([2], [0], cfg)


def test_matrices_are_numpy():
    _, basis, sys = default_system()
    assert sys.coupling.shape == (len(basis), len(basis))
    assert np.allclose(sys.coupling, sys.coupling.T)
    assert sys.lambda_ == pytest.approx(0.01)


def test_perturbative_and_riccati_agree():
    _, _, sys = default_system(10.0, 0.01)
    xy = bt.perturbative_xy(sys)
    sol = bt.solve_xy(sys)
    assert sol.converged
    assert sol.residuals.r1 < 1e-10
    assert np.abs(sol.x - xy.x).max() < 1e-4
    exact = bt.exact_spectrum(sol, sys)
    second = bt.quasiparticle_levels(bt.spectrum_matrix(sys, 2))
    assert np.abs(exact - second).max() < 1e-4


def test_scalar_riccati():
    x, y = bt.solve_1x1(2.0, 0.3)
    assert x * x - y * y == pytest.approx(1.0)
    with pytest.raises(bt.NoSolutionError):
        bt.solve_1x1(1.0, 0.6)


def test_occupation():
    assert bt.occupation(1.0, 1.0) == pytest.approx(1.0 / math.expm1(1.0))
    with pytest.raises(bt.DomainError):
        bt.occupation(-1.0, 1.0)


def test_sweep_interacting_above_ideal():
    cfg = bt.TrapConfig()
    basis = bt.enumerate_basis(cfg, 100.0)
    ts = [float(t) for t in range(1, 21)]
    inter = bt.sweep(cfg, basis, ts)
    ideal = bt.sweep(cfg, basis, ts, bt.SolverKind.IDEAL)
    assert inter.all_converged() and ideal.all_converged()
    assert all(a.n0 >= b.n0 for a, b in zip(inter.points, ideal.points))
    assert inter.to_csv().startswith(
        "T,n0_over_N,energy_excess_per_N,lambda,converged,iterations\n")


def test_parse_config():
    cfg = bt.parse_config("g = 0.001\nt_max = 5\nsolver = ideal\n")
    assert cfg.trap.g == pytest.approx(0.001)
    assert cfg.solver == bt.SolverKind.IDEAL
    assert cfg.temperature_grid() == [1.0, 2.0, 3.0, 4.0, 5.0]
    with pytest.raises(bt.ConfigError):
        bt.parse_config("bogus = 1\n")
