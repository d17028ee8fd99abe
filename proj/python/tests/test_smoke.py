import math

import pytest

import qdho

REF = dict(omega0=1.0, gamma1=0.25, gamma2=0.5)


def test_zero_point_matches_quadrature():
    p = qdho.ModelParams(**REF)
    closed = qdho.zero_point(p)
    quad = qdho.thermal(p)
    assert closed.q2 == pytest.approx(0.94199785210607904, rel=1e-13)
    assert quad.q2 == pytest.approx(closed.q2, rel=1e-9)
    assert quad.pi2 == pytest.approx(closed.pi2, rel=1e-9)
    assert quad.energy == pytest.approx(closed.energy, rel=1e-9)
    assert quad.path == "quadrature"
    assert closed.uncertainty_product >= 0.5


def test_thermal_and_matsubara_agree():
    p = qdho.ModelParams(**REF)
    q = qdho.thermal(p, theta=1.0)
    assert q.q2 == pytest.approx(6.7488233860453431, rel=1e-9)
    assert qdho.q2_matsubara(p, 1.0) == pytest.approx(q.q2, rel=1e-6)


def test_chi_and_kramers_kronig():
    p = qdho.ModelParams(**REF)
    assert qdho.chi(0.0, p) == pytest.approx(0.85)
    re, err = qdho.kk_re_chi(1.0, p)
    assert re == pytest.approx(qdho.chi(1.0, p).real, abs=1e-8)
    assert err >= 0.0


def test_stability_boundary():
    report = qdho.check_diagonalizable(qdho.ModelParams(**REF))
    assert report.diagonalizable
    assert report.integral == pytest.approx(0.85)
    unstable = qdho.ModelParams(omega0=1.0, gamma1=0.25, gamma2=3.0)
    assert not unstable.diagonalizable
    with pytest.raises(qdho.NotDiagonalizableError):
        qdho.thermal(unstable)


def test_poles_lie_in_lower_half_plane():
    for pole in qdho.poles(qdho.ModelParams(**REF)):
        assert pole.imag < 0.0


def test_oracle_is_close_to_continuum():
    p = qdho.ModelParams(**REF)
    discrete = qdho.oracle(p, n_modes=400, omega_max=40.0)
    assert discrete.path == "oracle"
    assert discrete.q2 == pytest.approx(qdho.zero_point(p).q2, rel=0.05)


def test_tabulated_source():
    p = qdho.ModelParams(**REF)
    grid = [10 ** (-2 + 4 * k / 199) for k in range(200)]
    values = [qdho.chi(w, p).imag for w in grid]
    table = qdho.TabulatedChi(grid, values, tail_exponent=1.0, omega0=1.0)
    assert table.im_chi(1.0) == pytest.approx(qdho.chi(1.0, p).imag, rel=1e-4)
    assert qdho.check_diagonalizable(table).integral == pytest.approx(0.85, rel=1e-4)
    # Im chi of the model falls off as 1/omega, so a faster declared tail is rejected.
    wrong = qdho.TabulatedChi(grid, values, tail_exponent=2.0, omega0=1.0)
    with pytest.raises(qdho.TailMismatchError):
        qdho.check_diagonalizable(wrong)


def test_invalid_parameters_raise():
    with pytest.raises(qdho.DomainError):
        qdho.ModelParams(omega0=-1.0)
    assert issubclass(qdho.DomainError, qdho.Error)
    assert not math.isnan(qdho.zero_point(qdho.ModelParams()).energy)
