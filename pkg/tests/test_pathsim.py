import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from besselbel.pathsim import (
    SamplerConfig,
    coupled_flow,
    discrete_stochastic_integral,
    first_passage_times,
    hitting_time_scaling_sample,
    read_path_dump,
    sample_exact_endpoint,
    sample_exact_endpoints,
    simulate_path,
    simulate_summaries,
    write_path_dump,
)
from besselbel.rng import path_rng


def cfg(**kw):
    base = dict(dt=1e-3, seed=5, stream_id=0)
    base.update(kw)
    return SamplerConfig(**base)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 4.0), st.floats(0.05, 2.0), st.integers(0, 2**32))
def test_path_invariants(delta, x, seed):
    p = simulate_path(delta, x, 0.5, cfg(dt=1e-2, seed=seed))
    assert p.rho.size == p.times.size == p.eta.size == p.d_vals.size
    assert np.all(p.rho >= 0)
    assert np.allclose(p.d_vals, p.rho * p.eta)
    assert np.all(np.diff(p.a_vals[: (p.t0_index or p.a_vals.size)]) >= 0)
    if p.t0_index is not None:
        assert np.all(p.eta[p.t0_index:] == 0)
        assert np.all(p.d_vals[p.t0_index:] == 0)
        if delta == 0.0:
            assert np.all(p.rho[p.t0_index:] == 0)


def test_eta_follows_a_for_milstein():
    p = simulate_path(0.5, 1.0, 0.3, cfg())
    k = p.t0_index or p.eta.size
    assert np.allclose(p.eta[:k], np.exp(0.25 * p.a_vals[:k]), rtol=1e-10)


def test_paths_are_reproducible_and_independent():
    c = cfg(seed=123)
    a = simulate_path(1.0, 1.0, 0.2, c, path_index=7)
    b = simulate_path(1.0, 1.0, 0.2, c, path_index=7)
    other = simulate_path(1.0, 1.0, 0.2, c, path_index=8)
    assert np.array_equal(a.rho, b.rho)
    assert not np.array_equal(a.rho, other.rho)
    assert not np.array_equal(path_rng(1, 0, 0).standard_normal(4), path_rng(1, 1, 0).standard_normal(4))


@pytest.mark.parametrize("scheme", ["milstein_sq_bessel_truncated", "euler_sq_bessel_truncated"])
def test_summaries_match_full_paths(scheme):
    c = cfg(seed=9, scheme=scheme)
    n, delta, x, T = 40, 0.5, 0.3, 0.4
    s = simulate_summaries(delta, x, T, c, n, record_times=[0.1, T])
    for i in range(n):
        p = simulate_path(delta, x, T, c, path_index=i)
        assert s.rho[i, -1] == pytest.approx(p.rho[-1], abs=1e-12)
        assert s.d[i, -1] == pytest.approx(p.d_vals[-1], rel=1e-10, abs=1e-12)
        assert s.stoch_int[i, -1] == pytest.approx(discrete_stochastic_integral(p), rel=1e-9, abs=1e-12)
        assert (s.t0_index[i] >= 0) == (p.t0_index is not None)


def test_worker_count_does_not_change_results():
    c = cfg(seed=3)
    a = simulate_summaries(1.5, 1.0, 0.2, c, 600, workers=1, chunk=128)
    b = simulate_summaries(1.5, 1.0, 0.2, c, 600, workers=3, chunk=128)
    assert np.array_equal(a.d, b.d)


def test_stop_at_hit_keeps_martingale_quantities():
    c = cfg(seed=4)
    full = simulate_summaries(0.5, 0.2, 0.5, c, 300, record_times=[0.25, 0.5])
    stop = simulate_summaries(0.5, 0.2, 0.5, c, 300, record_times=[0.25, 0.5], stop_at_hit=True)
    assert np.array_equal(full.d, stop.d)
    assert np.array_equal(full.t0_index, stop.t0_index)


def test_milstein_discrete_integral_is_exact_before_absorption():
    # for delta = 1 the truncation term vanishes and sum eta dB = D_T - x on surviving paths
    c = cfg(dt=1e-3, seed=11)
    for i in range(20):
        p = simulate_path(1.0, 1.0, 0.5, c, path_index=i)
        if p.t0_index is None:
            assert discrete_stochastic_integral(p) == pytest.approx(p.d_vals[-1] - 1.0, abs=1e-12)


def test_euler_residual_shrinks_like_sqrt_dt():
    rms = []
    dts = (1e-2, 1e-3)
    for dt in dts:
        s = simulate_summaries(2.0, 1.0, 1.0, cfg(dt=dt, seed=2, scheme="euler_sq_bessel_truncated"), 400)
        rms.append(math.sqrt(np.mean((s.stoch_int[:, -1] - (s.d[:, -1] - 1.0)) ** 2)))
    slope = math.log(rms[0] / rms[1]) / math.log(dts[0] / dts[1])
    assert 0.3 < slope < 0.7


def test_exact_endpoint_moments():
    rng = np.random.default_rng(0)
    delta, z0, T = 1.5, 2.0, 0.8
    xs = sample_exact_endpoints(delta, z0, T, 200_000, rng)
    assert xs.mean() == pytest.approx(z0 + delta * T, abs=4 * xs.std() / math.sqrt(xs.size))
    assert 0.0 <= sample_exact_endpoint(delta, z0, T, rng)


@pytest.mark.parametrize("delta", [0.5, 2.0, 3.0])
def test_exact_endpoint_ks_against_kernel(delta):
    rng = np.random.default_rng(17)
    z0, T = 1.0, 1.0
    xs = sample_exact_endpoints(delta, z0, T, 20_000, rng)
    p = stats.kstest(xs / T, stats.ncx2(delta, z0 / T).cdf).pvalue
    assert p > 1e-3


def test_exact_endpoint_delta0_atom():
    rng = np.random.default_rng(1)
    xs = sample_exact_endpoints(0.0, 1.0, 1.0, 100_000, rng)
    atom = math.exp(-0.5)
    frac = np.mean(xs == 0)
    assert frac == pytest.approx(atom, abs=4 * math.sqrt(atom * (1 - atom) / xs.size))


def test_coupled_flow_is_ordered():
    for i in range(10):
        _, _, diag = coupled_flow(0.5, 0.5, 0.7, 1.0, cfg(seed=i))
        assert diag.violations == 0
        if diag.k_star is not None:
            assert diag.post_coalescence_gap <= cfg().rho_floor


def test_first_passage_and_scaling_shapes():
    c = cfg(dt=1e-2, seed=1)
    t = first_passage_times(0.0, 0.5, c, 50, horizon=5.0)
    assert t.shape == (50,)
    assert np.all((t > 0) | np.isinf(t))
    sc = hitting_time_scaling_sample(0.5, 0.5, 200, c, cap_factor=20.0)
    assert sc.samples_y.size == sc.samples_1.size == 200
    assert 0 <= sc.pvalue <= 1
    assert sc.samples_y.max() <= 20.0 and sc.samples_1.max() <= 20.0
    with pytest.raises(ValueError):
        hitting_time_scaling_sample(2.0, 0.5, 10, c)


def test_dump_round_trip():
    p = simulate_path(0.5, 0.4, 0.05, cfg())
    buf = io.BytesIO()
    write_path_dump(p, buf)
    raw = buf.getvalue()
    assert raw[:8] == b"BPATH01\0"
    assert len(raw) == 32 + 8 * 4 * p.times.size
    header, recs = read_path_dump(io.BytesIO(raw))
    assert header["N"] == p.times.size - 1
    assert header["delta"] == pytest.approx(0.5)
    assert np.array_equal(recs[:, 1], p.rho)
    assert np.array_equal(recs[:, 3], p.d_vals)
    with pytest.raises(ValueError):
        read_path_dump(io.BytesIO(b"X" * 40))


def test_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(dt=0.0)
    with pytest.raises(ValueError):
        SamplerConfig(rho_floor=0.5)
    with pytest.raises(ValueError):
        SamplerConfig(scheme="rk4")
    with pytest.raises(ValueError):
        simulate_path(1.0, 0.0, 1.0, cfg())
    assert cfg().replace(dt=0.5).n_steps(1.0) == 2
