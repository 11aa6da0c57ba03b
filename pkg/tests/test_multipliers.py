import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from liedual import groups as grp
from liedual import multipliers as M
from liedual import reps
from liedual import symbols as S
from liedual.fields import MarginError, Symbol
from liedual.fourier import convolve, forward_transform, rule_for_band
from liedual.groups import Group

SU2 = Group.su2()
T1 = Group.torus(1)
MIXED = Group.product(SU2, T1)


def parity(G, band):
    if G.kind == "su2":
        return Symbol(G, band, {l: (-1.0) ** l * np.eye(l + 1) for l in reps.enumerate_band(G, band)}, margin=0)
    return Symbol(G, band, {p: np.array([[(-1.0) ** p[0]]]) for p in reps.enumerate_band(G, band)}, margin=0)


def sign_symbol(band):
    return Symbol(T1, band, {p: np.array([[float(np.sign(p[0]))]]) for p in reps.enumerate_band(T1, band)}, margin=0)


def loglog_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# -- cutoffs and partitions -----------------------------------------------------
def test_smooth_step_values():
    u = np.array([-3.0, 0.0, 1.0, 2.0, 5.0])
    assert np.array_equal(M.smooth_step(u), [1.0, 1.0, 1.0, 0.0, 0.0])
    mid = M.smooth_step(np.linspace(1.0, 2.0, 101))
    assert np.all(np.diff(mid) <= 0)
    assert M.smooth_step(1.5) == pytest.approx(0.5)


def test_partition_of_unity():
    P = M.DyadicPartition(j_range=(-4, 16))
    lo, hi = P.covered_span()
    lam = np.geomspace(lo, hi, 5001)
    assert np.max(np.abs(P.partition_sum(lam) - 1.0)) < 1e-12


@pytest.mark.parametrize("scale", [2.0, 4.0])
def test_eta_support(scale):
    P = M.DyadicPartition(scale=scale)
    lam = np.linspace(0, 3 * scale, 20001)
    a, b = P.support
    eta = P.eta(lam)
    assert np.all(eta[(lam <= a) | (lam >= b)] == 0)
    assert np.all(eta[(lam > a + 0.1) & (lam < b - 0.1 * scale)] > 0)


def test_bump_support():
    assert M.bump(0.0) == pytest.approx(math.exp(-1))
    assert M.bump(1.0) == 0.0 and M.spectral_bump(1.0) == 0.0
    assert M.spectral_bump(0.0) == 1.0


# -- spectral symbols -------------------------------------------------------------
def test_spectral_symbol_examples():
    one = M.spectral_symbol(lambda lam: 1.0, SU2, 20)
    assert S.linf_norm(one - S.identity(SU2, 20)) == 0.0
    t = 0.7
    heat = M.spectral_symbol(lambda lam: math.exp(-t * lam), SU2, 20)
    assert np.allclose(heat.entry(1), math.exp(-0.75 * t) * np.eye(2), atol=1e-15)
    ind = M.spectral_symbol(lambda lam: 1.0 if 2 <= lam <= 4 else 0.0, T1, 30)
    assert sorted(ind.entries) == [(-2,), (2,)]


@pytest.mark.parametrize("G", [SU2, T1, MIXED], ids=str)
def test_band_projectors_idempotent(G):
    for j in range(0, 4):
        P = M.band_indicator(G, 40, j)
        assert S.linf_norm(P * P - P) == 0.0


# -- heat kernel --------------------------------------------------------------------
@pytest.mark.parametrize("G,t", [(SU2, 0.5), (SU2, 2.0), (T1, 0.5), (MIXED, 1.0)], ids=str)
def test_heat_kernel_properties(G, t):
    band = M.heat_band(G, t)
    rule = rule_for_band(G, band)
    p = M.heat_kernel(G, t, band=band, rule=rule)
    assert rule.integrate(p.values).real == pytest.approx(1.0, abs=1e-12)
    assert np.all(p.values.real > 0)
    inv = grp.batch_inverse(G, rule.nodes)
    flipped = M.heat_on_rule(G, t, M.QuadratureRule(G, inv, rule.weights, None, None), band)
    assert np.max(np.abs(flipped.values - p.values)) < 1e-10


def test_heat_mass_from_trivial_coefficient():
    c = forward_transform(M.heat_kernel(SU2, 1.0), M.heat_band(SU2, 1.0))
    assert c.entry(0)[0, 0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("G", [SU2, T1], ids=str)
def test_heat_semigroup(G):
    t, s = 0.6, 0.9
    band = M.heat_band(G, t)
    rule = rule_for_band(G, band)
    prod = convolve(M.heat_kernel(G, t, band=band, rule=rule), M.heat_kernel(G, s, band=band, rule=rule), band)
    ref = M.heat_symbol(G, t + s, band)
    for p in ref.domain:
        assert np.allclose(prod.entry(p), ref.entry(p), atol=1e-10)


def test_heat_truncation_error():
    with pytest.raises(M.TruncationError):
        M.heat_kernel(SU2, 0.1, band=72)
    with pytest.raises(ValueError):
        M.heat_kernel(SU2, -1.0)


def test_heat_tail_decreases_with_band():
    tails = [M.heat_tail(SU2, 0.5, b) for b in (10, 40, 160)]
    assert tails[0] > tails[1] > tails[2] >= 0
    assert M.heat_tail(SU2, 0.5, M.heat_band(SU2, 0.5)) < M.HEAT_TAIL_TOL


def test_central_rule_integrates_class_functions():
    # int_SU(2) chi_l = delta_{l0}; int_T1 |x|^2 = pi^2 / 3
    rule = M.central_rule(SU2, 64)
    chi = reps.characters_batch(SU2, (0, 1, 4), rule.nodes)
    assert np.allclose([rule.integrate(c).real for c in chi], [1, 0, 0], atol=1e-13)
    r1 = M.central_rule(T1, 64)
    assert r1.integrate(r1.nodes[:, 0] ** 2) == pytest.approx(math.pi**2 / 3, rel=1e-13)


@pytest.mark.parametrize("G", [SU2, T1], ids=str)
@pytest.mark.parametrize("s", [1, 2])
def test_moment_slope(G, s):
    _, slope = M.moments(G, s, [2.0**k for k in range(-10, -3)])
    assert abs(slope - s / 2) <= 0.1 * s / 2


def test_moments_need_grid():
    with pytest.raises(ValueError):
        M.moments(T1, 1, [0.1])


def test_gaussian_constant_is_finite():
    ts = [0.05, 0.1, 0.5, 1.0, 2.0]
    for G in (SU2, T1):
        C = M.gaussian_constant(G, ts)
        assert 1.0 < C < 50.0
        assert M.gaussian_constant(G, ts[1:]) <= C


# -- Hormander norm ------------------------------------------------------------------
def test_hormander_zero_and_identity():
    assert M.hormander_norm(0 * S.identity(SU2, 42)) == 0.0
    # block values r^{s-n/2} ||eta(r^-2 L)||_{H^s} increase towards a finite limit
    rep = M.hormander_report(S.identity(SU2, 5000), r_grid=[2.0**3, 2.0**4, 2.0**5])
    v = [b["value"] for b in rep.per_block]
    assert len(v) == 3 and v[0] < v[1] < v[2] < 50
    assert v[2] - v[1] < 0.5 * (v[1] - v[0])


def test_hormander_report_blocks():
    rep = M.hormander_report(S.identity(SU2, 42))
    js = [b["j"] for b in rep.per_block]
    assert js == sorted(js) and rep.linf == 1.0
    assert rep.constant == pytest.approx(1.0 + max(b["value"] for b in rep.per_block))
    row = rep.to_json()
    assert row["checker"] == "hormander" and row["s"] == 2.0


def test_hormander_conjugation_invariance():
    # sigma -> pi(y) sigma(pi) pi(y)^* conjugates the kernel by y; the weights are class functions
    rng = np.random.default_rng(0)
    for G, band in [(SU2, 42), (MIXED, 12)]:
        s = S.random_symbol(G, band, rng=rng, margin=3, decay=1.0)
        y = grp.random_element(G, rng)
        ent = {p: reps.evaluate(G, p, y) @ s.entry(p) @ reps.evaluate(G, p, y).conj().T for p in s.domain}
        sy = Symbol(G, band, ent, domain=s.domain)
        assert M.hormander_norm(sy) == pytest.approx(M.hormander_norm(s), rel=1e-10)


def test_eta_independence_ratio():
    f = lambda lam: complex((1 + lam) ** 1j)  # noqa: E731
    ratios = []
    for l in (8, 12, 16):
        s = S.spectral(f, SU2, l * (l + 2) / 4, margin=0)
        ratios.append(M.hormander_norm(s) / M.hormander_norm(s, partition=M.DyadicPartition(scale=4.0)))
    assert max(ratios) / min(ratios) <= 1.2
    assert all(0.5 < r < 2 for r in ratios)


def test_indicator_vs_smooth_windows():
    f = lambda lam: complex((1 + lam) ** 1j)  # noqa: E731
    rs = []
    for band in (20, 42, 72):
        s = S.spectral(f, SU2, band, margin=0)
        rs.append(M.hormander_norm(s, partition=M.IndicatorWindow()) / M.hormander_norm(s))
    assert all(0.5 < r < 4 for r in rs)


def test_mihlin_controls_hormander():
    rng = np.random.default_rng(1)
    rs = []
    for _ in range(8):
        s = S.random_symbol(SU2, 72, rng=rng, margin=3, decay=2.0)
        rs.append(M.hormander_norm(s) / M.mihlin_constant(s))
    assert max(rs) < 2.0


# -- Mihlin ------------------------------------------------------------------------
def test_mihlin_identity():
    for G in (SU2, T1, MIXED):
        assert M.mihlin_constant(S.identity(G, 20)) == pytest.approx(1.0)


def test_mihlin_imaginary_power_band_stable():
    for G, bands in [(SU2, (20, 42, 72)), (T1, (64, 256, 1024))]:
        for a in (1.0, 3.0):
            f = lambda lam, a=a: complex((1 + lam) ** (1j * a))  # noqa: E731
            vals = [M.mihlin_constant(S.spectral(f, G, b, margin=0)) for b in bands]
            assert max(vals) / min(vals) < 1.1


def test_mihlin_torus_parity_grows_like_sqrt_band():
    bands = [64, 256, 1024, 4096]
    vals = [M.mihlin_constant(parity(T1, b)) for b in bands]
    assert abs(loglog_slope(bands, vals) - 0.5) < 0.05
    # interior top label l = sqrt(band) - 1 gives 2 (1 + l^2)^(1/2)
    assert vals[0] == pytest.approx(2 * math.sqrt(50))


def test_mihlin_su2_parity_grows():
    vals = [M.mihlin_constant(parity(SU2, b)) for b in (20, 42, 72)]
    assert vals[0] < vals[1] < vals[2]


def test_mihlin_margin_error():
    with pytest.raises(MarginError):
        M.mihlin_constant(S.random_symbol(SU2, 20, margin=1))


# -- Marcinkiewicz ---------------------------------------------------------------------
def test_marcinkiewicz_examples():
    assert M.marcinkiewicz_constant(0 * S.identity(T1, 64)) == 0.0
    assert [M.marcinkiewicz_constant(S.identity(T1, b)) for b in (64, 256, 1024)] == [8.0] * 3
    assert [M.marcinkiewicz_constant(sign_symbol(b)) for b in (64, 256, 1024)] == [8.0] * 3


def test_marcinkiewicz_s0_range():
    with pytest.raises(ValueError):
        M.marcinkiewicz_constant(S.identity(T1, 64), s0=2)
    rep = M.marcinkiewicz_report(S.identity(SU2, 72), s0=2)
    assert rep.checker == "marcinkiewicz" and rep.constant > 0


# -- probes ----------------------------------------------------------------------------
@pytest.mark.parametrize("G,s", [(SU2, 2), (T1, 1)], ids=["su2", "t1"])
def test_heat_scaling_slope(G, s):
    slope, _ = M.heat_scaling_probe(G, s, [2.0**k for k in range(-10, -3)])
    target = (s - G.dim / 2) / 2
    assert abs(slope - target) <= 0.1 * target


def test_heat_scaling_rejects_bad_input():
    with pytest.raises(ValueError):
        M.heat_scaling_probe(T1, 1, [0.1])
    with pytest.raises(ValueError):
        M.heat_scaling_probe(T1, 1, [0.1, -0.1])
    with pytest.raises(MarginError):
        M.heat_scaling_probe(T1, 1, [0.1, 0.05], f=lambda lam: math.exp(-lam))


def test_imaginary_power_examples():
    f = M.imaginary_power(2.0)
    assert f(0.0) == 1.0 and abs(f(3.0)) == pytest.approx(1.0)
    rows, _ = M.imaginary_power_probe(SU2, 42, [0.0, 1.0, 8.0])
    assert rows[0][1] == pytest.approx(M.hormander_norm(S.identity(SU2, 42)))
    assert rows[2][1] > rows[1][1]


def test_imaginary_power_growth():
    rows, expo = M.imaginary_power_probe(SU2, 288, [1.0, 2.0, 4.0, 8.0, 16.0])
    vals = [v for _, v in rows]
    assert all(b >= a * 0.95 for a, b in zip(vals, vals[1:]))
    assert 1.0 <= expo <= 3.0


def test_imaginary_power_local_uniform_bound():
    ratios = []
    for a in (1.0, 2.0, 4.0, 8.0):
        h = M.hormander_norm(S.spectral(M.imaginary_power(a), SU2, 72, margin=0))
        ratios.append(h / M.lu_sobolev_norm(M.imaginary_power(a), 2))
    assert max(ratios) / min(ratios) < 1.5


def test_sobolev_line_norm_gaussian():
    # ||e^{-x^2/2}||_{L^2(R)}^2 = sqrt(pi)
    v = M.sobolev_line_norm(lambda x: np.exp(-x**2 / 2), 0, -10, 10)
    assert v == pytest.approx(math.pi**0.25, rel=1e-10)


@pytest.fixture(scope="module")
def su2_family():
    band = 12
    rule = rule_for_band(SU2, band)
    return band, rule, M.probe_family(SU2, band, rule, seed=0, count=4)


def test_lp_ratio_identity(su2_family):
    band, _, fam = su2_family
    for p in (1.5, 2.0, 4.0):
        assert M.lp_ratio_probe(S.identity(SU2, band), p, fam) == pytest.approx(1.0, rel=1e-10)


def test_lp_ratio_l2_bound(su2_family):
    band, _, fam = su2_family
    s = S.random_symbol(SU2, band, rng=np.random.default_rng(3))
    assert M.lp_ratio_probe(s, 2.0, fam) <= S.linf_norm(s) + 1e-8


def test_lp_ratio_heat_contraction(su2_family):
    band, _, fam = su2_family
    assert M.lp_ratio_probe(M.heat_symbol(SU2, 0.5, band), 4.0, fam) <= 1 + 1e-8


def test_lp_ratio_errors(su2_family):
    band, rule, _ = su2_family
    from liedual.fourier import GridFunction

    with pytest.raises(ValueError):
        M.lp_ratio_probe(S.identity(SU2, band), 2.0, [])
    with pytest.raises(ValueError):
        M.lp_ratio_probe(S.identity(SU2, band), 2.0, [GridFunction(rule, np.zeros(rule.size))])


@given(st.floats(0.05, 50.0))
def test_heat_symbol_bounded_by_one(t):
    s = M.heat_symbol(SU2, t, 30)
    assert S.linf_norm(s) == 1.0
    assert all(np.all(np.diag(s.entry(p)).real <= 1.0) for p in s.domain)
