"""Covariance kernels: closed forms, incremental variances, tabulated I/O."""

import numpy as np
import pytest

from qvar import errors, kernels
from helpers import fbm_cov


def test_brownian_covariance_is_min():
    k = kernels.brownian(horizon=2.0)
    assert kernels.covariance(k, 0.3, 1.7) == 0.3
    assert kernels.covariance(k, 1.5, 0.5) == 0.5
    assert kernels.covariance(k, 2.0, 2.0) == 2.0


def test_fbm_half_matches_brownian():
    k = kernels.fbm(0.5)
    bm = kernels.brownian()
    for s, t in [(0.1, 0.9), (0.4, 0.4), (0.0, 1.0)]:
        assert kernels.covariance(k, s, t) == pytest.approx(
            kernels.covariance(bm, s, t), abs=1e-15
        )


def test_fbm_closed_form():
    k = kernels.fbm(0.7)
    for s, t in [(0.2, 0.8), (0.35, 0.35), (1.0, 0.1)]:
        assert kernels.covariance(k, s, t) == pytest.approx(fbm_cov(s, t, 0.7), rel=1e-15)


def test_subfbm_closed_form_and_variance():
    hurst = 0.6
    k = kernels.sub_fbm(hurst)
    s, t = 0.3, 0.9
    expected = s**1.2 + t**1.2 - 0.5 * ((s + t) ** 1.2 + abs(t - s) ** 1.2)
    assert kernels.covariance(k, s, t) == pytest.approx(expected, rel=1e-15)
    # variance at t: (2 - 2^{2H-1}) t^{2H}
    var = kernels.covariance(k, t, t)
    assert var == pytest.approx((2.0 - 2.0 ** (2 * hurst - 1)) * t ** (2 * hurst), rel=1e-14)


def test_bifbm_reduces_to_fbm_at_k_one():
    kb = kernels.bifbm(0.6, 1.0)
    kf = kernels.fbm(0.6)
    times = np.linspace(0.0, 1.0, 9)
    gb = kernels.gram(kb, times)
    gf = kernels.gram(kf, times)
    assert np.abs(gb - gf).max() < 1e-15


def test_bifbm_variance_power_law():
    k = kernels.bifbm(0.6, 0.5)
    for t in (0.25, 0.5, 1.0):
        assert kernels.covariance(k, t, t) == pytest.approx(t ** (2 * 0.6 * 0.5), rel=1e-14)


def test_incremental_variance_matches_gram_expansion():
    for k in [kernels.brownian(), kernels.fbm(0.3), kernels.sub_fbm(0.7), kernels.bifbm(0.5, 1.2)]:
        for s, t in [(0.2, 0.7), (0.0, 1.0), (0.6, 0.6)]:
            via_r = (
                kernels.covariance(k, s, s)
                + kernels.covariance(k, t, t)
                - 2.0 * kernels.covariance(k, s, t)
            )
            assert kernels.incremental_variance(k, s, t) == pytest.approx(via_r, abs=1e-12)


def test_incremental_variance_cancellation_free():
    # The closed form stays exact where the R-based expansion loses digits.
    k = kernels.fbm(0.3)
    s, t = 0.5, 0.5 + 1e-9
    assert kernels.incremental_variance(k, s, t) == pytest.approx((t - s) ** 0.6, rel=1e-12)


def test_weighted_difference_cov_zero_sum_matches_r_route():
    k = kernels.fbm(0.65)
    ta = np.array([0.0, 0.25, 0.5])
    wa = np.array([1.0, -2.0, 1.0])
    tb = np.array([0.5, 0.75])
    wb = np.array([-1.0, 1.0])
    fast = kernels.weighted_difference_cov(k, ta, wa, tb, wb)
    slow = float(wa @ kernels.gram_cross(k, ta, tb) @ wb)
    assert fast == pytest.approx(slow, abs=1e-12)


def test_weighted_difference_disjoint_bm_increments_are_zero():
    k = kernels.brownian()
    val = kernels.weighted_difference_cov(
        k, [0.0, 0.25], [-1.0, 1.0], [0.5, 0.75], [-1.0, 1.0]
    )
    assert val == 0.0


def test_domain_error_outside_horizon():
    k = kernels.fbm(0.5, horizon=1.0)
    with pytest.raises(errors.DomainError):
        kernels.covariance(k, 0.5, 1.5)
    with pytest.raises(errors.DomainError):
        kernels.covariance(k, -0.1, 0.5)


@pytest.mark.parametrize(
    "factory",
    [
        lambda: kernels.fbm(0.0),
        lambda: kernels.fbm(1.0),
        lambda: kernels.sub_fbm(-0.2),
        lambda: kernels.bifbm(0.6, 2.5),
        lambda: kernels.bifbm(0.9, 1.5),  # H*K >= 1
        lambda: kernels.KernelSpec("nope"),
        lambda: kernels.brownian(horizon=0.0),
    ],
)
def test_invalid_parameters_raise_config_error(factory):
    with pytest.raises(errors.ConfigError):
        factory()


def _write_tabulated(path, grid, gram):
    rows = [",".join(repr(float(x)) for x in grid)]
    rows += [",".join(repr(float(x)) for x in row) for row in gram]
    path.write_text("\n".join(rows) + "\n")


def test_tabulated_round_trip(tmp_path):
    grid = np.array([0.0, 0.5, 1.0])
    gram = np.array([[0.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.0, 0.5, 1.0]])
    f = tmp_path / "kern.csv"
    _write_tabulated(f, grid, gram)
    k = kernels.tabulated_from_csv(f)
    assert kernels.covariance(k, 0.5, 1.0) == 0.5
    np.testing.assert_allclose(kernels.gram(k, grid), gram, atol=0)


def test_tabulated_off_grid_query_raises(tmp_path):
    f = tmp_path / "kern.csv"
    _write_tabulated(f, [0.0, 1.0], np.array([[0.0, 0.0], [0.0, 1.0]]))
    k = kernels.tabulated_from_csv(f)
    with pytest.raises(errors.DomainError):
        kernels.covariance(k, 0.3, 1.0)


def test_tabulated_validation(tmp_path):
    f = tmp_path / "bad.csv"
    _write_tabulated(f, [0.0, 1.0], np.array([[0.0, 0.4], [0.0, 1.0]]))
    with pytest.raises(errors.DataError, match="symmetric"):
        kernels.tabulated_from_csv(f)
    _write_tabulated(f, [0.0, 1.0], np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(errors.DataError, match="PSD"):
        kernels.tabulated_from_csv(f)


def test_parse_kernel():
    assert kernels.parse_kernel("bm").family == "bm"
    k = kernels.parse_kernel("fbm:0.7", horizon=2.0)
    assert (k.family, k.hurst, k.horizon) == ("fbm", 0.7, 2.0)
    k = kernels.parse_kernel("bifbm:0.6:0.5")
    assert (k.hurst, k.k) == (0.6, 0.5)
    assert kernels.parse_kernel("subfbm:0.4").family == "subfbm"
    with pytest.raises(errors.ConfigError):
        kernels.parse_kernel("fbm")
    with pytest.raises(errors.ConfigError):
        kernels.parse_kernel("weird:1")
