"""Spectral calculus of the Laplacian and Fourier multiplier conditions.

Contents: spectral symbols and the heat kernel, smooth dyadic windows, the
Hormander norm ``||sigma||_{L^inf} + sup_r r^{s - n/2} ||sigma eta(r^-2 L)||_{H^s}``,
the Mihlin and Marcinkiewicz constants, and the empirical probes (heat
scaling, heat moments, imaginary powers, ``L^p`` ratios).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import reps
from .fields import MarginError, Symbol
from .fourier import GridFunction, inverse_transform, rule_for_band, synthesize
from .groups import Group, QuadratureRule, batch_distance
from .sobolev import hs_norm_diffside, l1s_norm, linf_norm
from .symbols import apply, delta_all, spectral

HEAT_TAIL_TOL = 1e-12


class TruncationError(ValueError):
    """The band misses too much of a spectral series."""


@dataclass(frozen=True)
class ScalarSpectralFunction:
    evaluator: object
    description: str = ""

    def __call__(self, lam):
        return self.evaluator(lam)


def spectral_symbol(f, G, band, margin=None):
    return spectral(f, G, band, margin=margin)


# -- smooth cutoffs -----------------------------------------------------------
def _psi(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(u):
    """Smooth ``chi``: 1 on ``(-inf, 1]``, 0 on ``[2, inf)``."""
    u = np.asarray(u, dtype=float)
    a = _psi(2.0 - u)
    b = _psi(u - 1.0)
    return a / (a + b)


def spectral_bump(lam):
    """``exp(-4 lam / (1 - lam))`` on ``[0, 1)``, zero beyond: smooth, supported in ``[0, 1]``."""
    lam = float(lam)
    return math.exp(-4.0 * lam / (1.0 - lam)) if lam < 1.0 else 0.0


def bump(lam):
    """``exp(-1/(1 - lam^2))`` on ``|lam| < 1``; support ``[0, 1]`` on the spectrum."""
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    inside = np.abs(lam) < 1
    out[inside] = np.exp(-1.0 / (1.0 - lam[inside] ** 2))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class DyadicPartition:
    """``eta(lam) = chi(lam / scale) - chi(lam)``, supported in ``(1, 2 scale)``.

    ``scale = 2`` gives support ``(1, 4)`` and ``sum_j eta(2^-j lam) = 1``.
    """

    scale: float = 2.0
    j_range: tuple = (-4, 16)

    def eta(self, lam):
        lam = np.asarray(lam, dtype=float)
        return smooth_step(lam / self.scale) - smooth_step(lam)

    @property
    def support(self):
        return (1.0, 2.0 * self.scale)

    def window(self, j):
        return lambda lam: float(self.eta(2.0 ** (-j) * lam))

    def partition_sum(self, lam, j_range=None):
        a, b = self.j_range if j_range is None else j_range
        lam = np.asarray(lam, dtype=float)
        return sum(self.eta(2.0 ** (-j) * lam) for j in range(a, b + 1))

    def covered_span(self, j_range=None):
        """Interval on which the windows sum to 1 (only for ``scale == 2``)."""
        a, b = self.j_range if j_range is None else j_range
        return (2.0 ** (a + 1), 2.0 ** (b + 1))


@dataclass(frozen=True)
class IndicatorWindow:
    """Sharp window ``1_[a0, b0)`` used in place of a smooth ``eta``."""

    a0: float = 1.0
    b0: float = 2.0

    def eta(self, lam):
        lam = np.asarray(lam, dtype=float)
        return ((lam >= self.a0) & (lam < self.b0)).astype(float)

    @property
    def support(self):
        return (self.a0, self.b0)

    def window(self, j):
        return lambda lam: float(self.eta(2.0 ** (-j) * lam))


# -- heat kernel -----------------------------------------------------------------
def _simple_factors(G):
    if G.kind == "torus":
        return ["circle"] * G.d
    if G.kind == "su2":
        return ["su2"]
    out = []
    for F in G.factors:
        out.extend(_simple_factors(F))
    return out


def _factor_spectrum(kind, t, rel=1e-30):
    """``(lambda, d^2 e^{-t lambda})`` until terms are negligible."""
    lams, ws = [], []
    k = 0
    while True:
        if kind == "circle":
            lam, mult, dsq = float(k * k), (1 if k == 0 else 2), 1.0
        else:
            lam, mult, dsq = k * (k + 2) / 4.0, 1, float((k + 1) ** 2)
        w = mult * dsq * math.exp(-t * lam)
        lams.append(lam)
        ws.append(w)
        if k > 4 and w < rel and lam * t > 1:
            break
        k += 1
    return np.array(lams), np.array(ws)


def heat_tail(G, t, band):
    """``sum_{lambda_pi > band} d_pi^2 e^{-t lambda_pi}``."""
    if t <= 0:
        raise ValueError("t must be positive")
    specs = [_factor_spectrum(k, t) for k in _simple_factors(G)]

    def tail(i, cut):
        lams, ws = specs[i]
        if i == len(specs) - 1:
            return float(ws[lams > cut + 1e-9].sum())
        return float(sum(w * tail(i + 1, cut - lam) for lam, w in zip(lams, ws)))

    return tail(0, float(band))


def heat_band(G, t, tol=HEAT_TAIL_TOL):
    """Smallest eigenvalue cutoff whose heat tail is below ``tol``."""
    band = 0.0
    step = 1.0
    while heat_tail(G, t, band) >= tol:
        band += step
        step *= 1.25
    lo, hi = 0.0, band
    while hi - lo > 0.5:
        mid = 0.5 * (lo + hi)
        if heat_tail(G, t, mid) < tol:
            hi = mid
        else:
            lo = mid
    labels = reps.enumerate_band(G, hi)
    return max(reps.casimir_eigenvalue(G, p) for p in labels)


def heat_symbol(G, t, band):
    return spectral(lambda lam: math.exp(-t * lam), G, band, margin=0)


def heat_kernel(G, t, band=None, rule=None, tol=HEAT_TAIL_TOL):
    """``p_t`` on the nodes of ``rule`` from its truncated spectral series."""
    if t <= 0:
        raise ValueError("t must be positive")
    band = heat_band(G, t, tol) if band is None else band
    tail = heat_tail(G, t, band)
    if tail >= tol:
        raise TruncationError(f"heat tail {tail:.3e} >= {tol:g} for t={t}, band={band}")
    rule = rule_for_band(G, band) if rule is None else rule
    return inverse_transform(heat_symbol(G, t, band), rule)


def central_rule(G, n):
    """Rule for integrating functions of the conjugacy class that are even in the angle.

    SU(2): ``x = diag(e^{i theta}, e^{-i theta})`` with Weyl density
    ``(2/pi) sin^2 theta`` on ``[0, pi]``. Circle: angles in ``[0, pi]`` with
    weight ``1/pi`` (functions of ``|x|``). Gauss-Legendre in ``theta``.
    """
    x, w = np.polynomial.legendre.leggauss(int(n))
    theta = 0.5 * math.pi * (x + 1.0)
    w = 0.5 * math.pi * w
    if G.kind == "su2":
        nodes = np.zeros((theta.size, 2, 2), dtype=np.complex128)
        nodes[:, 0, 0] = np.exp(1j * theta)
        nodes[:, 1, 1] = np.exp(-1j * theta)
        weights = (2.0 / math.pi) * np.sin(theta) ** 2 * w
    elif G.kind == "torus" and G.d == 1:
        nodes = theta[:, None]
        weights = w / math.pi
    else:
        raise NotImplementedError("central rules exist for SU(2) and the circle only")
    return QuadratureRule(G, nodes, weights, None, None)


def heat_on_rule(G, t, rule, band=None):
    band = heat_band(G, t) if band is None else band
    sym = heat_symbol(G, t, band)
    return GridFunction(rule, synthesize(sym, G, rule.nodes, rule.size))


def _central_size(G, band):
    deg = reps.max_degree(G, reps.enumerate_band(G, band))
    return 4 * int(deg) + 256


def heat_moment(G, t, s, band=None):
    """``int |x|^s p_t(x) dx`` by a class-function rule."""
    band = heat_band(G, t) if band is None else band
    rule = central_rule(G, _central_size(G, band))
    p = heat_on_rule(G, t, rule, band)
    r = batch_distance(G, rule.nodes)
    return float(rule.integrate(r**s * p.values.real))


def moments(G, s, t_grid):
    """Table of heat moments and the fitted log-log slope in ``t``."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size < 2:
        raise ValueError("need at least two t values")
    vals = np.array([heat_moment(G, t, s) for t in t_grid])
    slope = float(np.polyfit(np.log(t_grid), np.log(vals), 1)[0])
    return vals, slope


def gaussian_constant(G, t_grid, n_nodes=None):
    """Smallest ``C`` with ``p_t(x) <= C t^{-n/2} exp(-|x|^2 / (C t))`` on the sampled grid."""
    n = G.dim
    best = 0.0
    for t in t_grid:
        band = heat_band(G, t)
        rule = central_rule(G, n_nodes or _central_size(G, band))
        p = heat_on_rule(G, t, rule, band).values.real
        r = batch_distance(G, rule.nodes)
        for pk, rk in zip(p, r):
            b = pk * t ** (n / 2)
            a = rk * rk / t
            if b <= 0:
                continue
            if a == 0:
                c = b
            else:
                g = lambda C: math.log(C) - a / C - math.log(b)  # noqa: E731
                lo, hi = 1e-12, max(1.0, b, a)
                while g(hi) < 0:
                    hi *= 2
                c = brentq(g, lo, hi) if g(lo) < 0 else lo
            best = max(best, c)
    return best


# -- band helpers ----------------------------------------------------------------
def band_with_margin(G, lam_max, margin):
    """Smallest band whose ``margin``-interior holds every label with ``lambda <= lam_max``."""
    from .fields import interior

    need = set(reps.enumerate_band(G, lam_max))
    band = float(lam_max)
    for _ in range(10000):
        dom = reps.enumerate_band(G, band)
        if need <= set(interior(G, dom, margin)):
            return band
        bigger = [reps.casimir_eigenvalue(G, p) for p in reps.enumerate_band(G, 2 * band + 4)]
        band = min(v for v in bigger if v > band + 1e-12)
    raise RuntimeError("band search did not terminate")


def default_s(G):
    return G.dim // 2 + 1


# -- Hormander norm ------------------------------------------------------------------
@dataclass
class CheckerReport:
    checker: str
    s: float
    constant: float
    band: float
    linf: float = 0.0
    per_block: list = field(default_factory=list)
    excluded: list = field(default_factory=list)
    verdict_threshold: float | None = None

    def to_json(self):
        return {
            "checker": self.checker,
            "s": self.s,
            "constant": self.constant,
            "linf": self.linf,
            "per_block": [dict(b) for b in self.per_block],
            "excluded_blocks": list(self.excluded),
            "band": self.band,
            "verdict_threshold": self.verdict_threshold,
        }


def _j_bounds(G, sigma, lo, hi):
    lams = [reps.casimir_eigenvalue(G, p) for p in sigma.domain]
    pos = [v for v in lams if v > 0]
    if not pos:
        return 0, -1
    j0 = int(math.floor(math.log2(min(pos) / hi))) - 1
    j1 = int(math.ceil(math.log2(max(pos) / lo))) + 1
    return j0, j1


def hormander_report(sigma, s=None, partition=None, r_grid=None):
    """``||sigma||_inf + max_r r^{s - n/2} ||sigma eta(r^-2 L)||_{H^s}`` over dyadic ``r = 2^{j/2}``.

    Blocks whose localized symbol has margin below ``s`` are left out and listed
    in ``excluded``.
    """
    G = sigma.group
    n = G.dim
    s = default_s(G) if s is None else s
    partition = DyadicPartition() if partition is None else partition
    lo, hi = partition.support
    if r_grid is None:
        j0, j1 = _j_bounds(G, sigma, lo, hi)
        js = list(range(j0, j1 + 1))
    else:
        js = [2.0 * math.log2(r) for r in r_grid]
    linf = linf_norm(sigma)
    best = 0.0
    blocks, excluded = [], []
    for j in js:
        win = spectral(partition.window(j), G, sigma.band, domain=sigma.domain)
        if not win.entries:
            continue
        loc = sigma * win
        loc = _auto_margin(loc)
        if loc.margin < s:
            excluded.append(j)
            continue
        r = 2.0 ** (j / 2.0)
        val = r ** (s - n / 2.0) * hs_norm_diffside(loc, s)
        blocks.append({"j": j, "r": r, "value": val})
        best = max(best, val)
    return CheckerReport("hormander", float(s), linf + best, sigma.band, linf, blocks, excluded)


def _auto_margin(field):
    return Symbol(field.group, field.band, field.entries, domain=field.domain, check=False)


def hormander_norm(sigma, s=None, partition=None, r_grid=None):
    return hormander_report(sigma, s, partition, r_grid).constant


# -- Mihlin and Marcinkiewicz -------------------------------------------------------
def mihlin_report(sigma, order=None):
    """``max_{|alpha| <= order} max_pi (1 + lambda_pi)^{|alpha|/2} ||Delta^alpha sigma(pi)||_op``."""
    G = sigma.group
    order = G.dim // 2 + 1 if order is None else order
    if 0 < sigma.margin < order:
        raise MarginError(f"Mihlin check needs margin >= {order} (or a global symbol)")
    per = [{"order": 0, "value": linf_norm(sigma)}]
    for k in range(1, order + 1):
        v = 0.0
        for fld in delta_all(sigma, k).values():
            for p, M in fld.entries.items():
                lam = reps.casimir_eigenvalue(G, p)
                v = max(v, (1.0 + lam) ** (k / 2.0) * float(np.linalg.norm(M, 2)))
        per.append({"order": k, "value": v})
    const = max(b["value"] for b in per)
    return CheckerReport("mihlin", float(order), const, sigma.band, per[0]["value"], per)


def mihlin_constant(sigma, order=None):
    return mihlin_report(sigma, order).constant


def band_indicator(G, band, j, domain=None):
    """Spectral projector onto ``2^j <= lambda < 2^{j+1}``."""
    a, b = 2.0**j, 2.0 ** (j + 1)
    return spectral(lambda lam: 1.0 if a <= lam < b else 0.0, G, band, domain=domain)


def marcinkiewicz_report(sigma, s0=1):
    """``max_{j >= 0} 2^{-j(n - s0)/2} ||sigma 1_[2^j, 2^{j+1})(L)||_{L^1_{s0}}``."""
    G = sigma.group
    n = G.dim
    if not 1 <= s0 <= n:
        raise ValueError(f"s0 must lie in [1, {n}]")
    lams = [reps.casimir_eigenvalue(G, p) for p in sigma.domain]
    top = max(lams) if lams else 0.0
    blocks, excluded = [], []
    best = 0.0
    j = 0
    while 2.0**j <= top:
        ind = band_indicator(G, sigma.band, j, domain=sigma.domain)
        if ind.entries:
            loc = _auto_margin(sigma * ind)
            if loc.margin < s0:
                excluded.append(j)
            else:
                val = 2.0 ** (-j * (n - s0) / 2.0) * l1s_norm(loc, s0)
                blocks.append({"j": j, "value": val})
                best = max(best, val)
        j += 1
    return CheckerReport("marcinkiewicz", float(s0), best, sigma.band, linf_norm(sigma), blocks, excluded)


def marcinkiewicz_constant(sigma, s0=1):
    return marcinkiewicz_report(sigma, s0).constant


# -- probes ---------------------------------------------------------------------
def heat_scaling_probe(G, s, t_grid, f=spectral_bump):
    """Fit the slope of ``log ||f(t L)||_{H^s}`` against ``log t``.

    ``f`` must vanish on ``[1, inf)``; each band keeps the support ``s`` steps
    inside the edge so the difference-side norm is exact.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size < 2:
        raise ValueError("need at least two t values")
    if np.any(t_grid <= 0):
        raise ValueError("t must be positive")
    vals = []
    for t in t_grid:
        band = band_with_margin(G, 1.0 / t, int(s))
        sym = spectral(lambda lam, t=t: float(f(t * lam)), G, band)
        if sym.margin < s:
            raise MarginError("spectral function is not supported in [0, 1]")
        vals.append(hs_norm_diffside(sym, int(s)))
    vals = np.array(vals)
    slope = float(np.polyfit(np.log(t_grid), np.log(vals), 1)[0])
    return slope, vals


def imaginary_power(alpha):
    """``lambda^{i alpha}`` with value 1 at ``lambda = 0``."""
    return lambda lam: 1.0 + 0j if lam == 0 else complex(np.exp(1j * alpha * math.log(lam)))


def imaginary_power_probe(G, band, alpha_grid, s=None, partition=None):
    """Rows ``(alpha, hormander_norm(L^{i alpha}))`` and the log-log growth exponent.

    The exponent is fitted on the upper half of the positive ``alpha`` values,
    where the alpha-independent part of the norm no longer dominates.
    """
    rows = []
    for a in alpha_grid:
        sym = spectral(imaginary_power(a), G, band, margin=0)
        rows.append((float(a), hormander_norm(sym, s, partition)))
    pos = sorted((abs(a), v) for a, v in rows if abs(a) >= 1)
    pos = pos[len(pos) // 2 - (len(pos) % 2 == 0):] if len(pos) > 2 else pos
    exponent = float("nan")
    if len(pos) >= 2:
        x = np.log([a for a, _ in pos])
        y = np.log([v for _, v in pos])
        exponent = float(np.polyfit(x, y, 1)[0])
    return rows, exponent


def sobolev_line_norm(g, s, a, b, n=4096):
    """``H^s(R)`` norm of a function supported in ``[a, b]`` via a padded FFT."""
    L = b - a
    x = a - L + np.arange(4 * n) * (3 * L / (4 * n))
    h = x[1] - x[0]
    vals = np.asarray(g(x), dtype=complex)
    gh = h * np.fft.fft(vals)
    xi = 2 * np.pi * np.fft.fftfreq(x.size, d=h)
    dxi = 2 * np.pi / (x.size * h)
    return float(np.sqrt(np.sum((1 + xi**2) ** s * np.abs(gh) ** 2) * dxi / (2 * np.pi)))


def lu_sobolev_norm(f, s, partition=None, r_grid=None):
    """``sup_r ||eta(.) f(r .)||_{H^s(R)}`` over a grid of ``r``."""
    partition = DyadicPartition() if partition is None else partition
    lo, hi = partition.support
    r_grid = [2.0 ** (k / 2.0) for k in range(-4, 25)] if r_grid is None else r_grid
    best = 0.0
    for r in r_grid:
        g = lambda x, r=r: partition.eta(x) * np.vectorize(f, otypes=[complex])(r * np.maximum(x, 0))  # noqa: E731
        best = max(best, sobolev_line_norm(g, s, lo, hi))
    return best


def lp_ratio_probe(sigma, p, family):
    """Largest ``||Op(sigma) f||_p / ||f||_p`` over a family of grid functions."""
    if not family:
        raise ValueError("empty probe family")
    best = 0.0
    for f in family:
        den = f.lp_norm(p)
        if den == 0:
            raise ValueError("zero-norm probe function")
        best = max(best, apply(sigma, f, check=False).lp_norm(p) / den)
    return best


def probe_family(G, band, rule, seed=0, count=8):
    """Random band-limited functions, single coefficients and translated heat bumps."""
    from .groups import random_element
    from .symbols import random_symbol

    rng = np.random.default_rng(seed)
    fam = []
    for k in range(count):
        sym = random_symbol(G, band, rng=rng)
        fam.append(inverse_transform(sym, rule))
    labels = reps.enumerate_band(G, band)
    for p in labels[1:1 + count]:
        T = reps.rep_table(rule, p)
        fam.append(GridFunction(rule, T[:, 0, 0]))
    t = max(0.05, 4.0 / max(band, 1.0))
    for _ in range(count):
        y = random_element(G, rng)
        ent = {}
        for q in labels:
            Y = reps.evaluate(G, q, y)
            ent[q] = math.exp(-t * reps.casimir_eigenvalue(G, q)) * Y.conj().T
        fam.append(inverse_transform(Symbol(G, band, ent, check=False), rule))
    return fam


__all__ = [
    "ScalarSpectralFunction", "TruncationError", "spectral_symbol", "smooth_step", "bump", "spectral_bump",
    "DyadicPartition", "IndicatorWindow", "heat_tail", "heat_band", "heat_symbol", "heat_kernel",
    "central_rule", "heat_moment", "moments", "gaussian_constant", "band_with_margin", "default_s",
    "CheckerReport", "hormander_report", "hormander_norm", "mihlin_report", "mihlin_constant",
    "band_indicator", "marcinkiewicz_report", "marcinkiewicz_constant", "heat_scaling_probe",
    "imaginary_power", "imaginary_power_probe", "sobolev_line_norm", "lu_sobolev_norm",
    "lp_ratio_probe", "probe_family", "Group",
]
