"""Homogeneous Sobolev seminorms on the dual, on both sides of the transform.

Difference side::

    ||sigma||_{H^s}^2 = sum_{|alpha| = s} sum_pi d_pi ||Delta^alpha sigma(pi)||_HS^2

Kernel side: ``||f||_{L^2(w)}`` with ``f = F^{-1} sigma`` and ``w`` one of
``q_1^s``, ``q_s`` or ``|x|^{2s}``, where ``a_phi(x) = ||phi(x) - I||_HS^2``,
``q_1 = sum_phi a_phi`` and ``q_s = sum_{|alpha| = s} prod_phi a_phi^alpha_phi``.
For integer ``s`` the ``q_s`` weight gives exactly the difference-side norm.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import reps
from .fields import MarginError
from .fourier import GridFunction, inverse_transform, rule_for_band
from .groups import batch_distance, quadrature_for_degree
from .symbols import delta_all, l2_norm, linf_norm, multi_indices

WEIGHT_KINDS = ("q1", "qs", "q1_pow", "dist_pow")


@dataclass(frozen=True, eq=False)
class WeightTable:
    rule: object
    kind: str
    s: float
    values: np.ndarray


def fundamental_defects(rule):
    """``a_phi(x_k) = ||phi(x_k) - I||_HS^2``, shape (len(fund), N)."""
    G = rule.group
    key = ("fund_defects",)
    if key not in rule._cache:
        fund = reps.fundamental_set(G)
        chi = reps.characters_batch(G, fund, rule.nodes)
        d = np.array([reps.dim(G, p) for p in fund], dtype=float)[:, None]
        a = 2.0 * d - 2.0 * chi.real
        rule._cache[key] = np.maximum(a, 0.0)
    return rule._cache[key]


def q1_values(rule):
    return WeightTable(rule, "q1", 1.0, fundamental_defects(rule).sum(axis=0))


def qs_values(s, rule):
    s = int(s)
    if s < 1:
        raise ValueError("s must be a positive integer")
    a = fundamental_defects(rule)
    vals = np.zeros(rule.size)
    for alpha in multi_indices(rule.group, s):
        term = np.ones(rule.size)
        for ai, k in zip(a, alpha):
            if k:
                term = term * ai**k
        vals += term
    return WeightTable(rule, "qs", float(s), vals)


def q1_pow_values(s, rule):
    if s < 0:
        raise ValueError("s must be nonnegative")
    q = q1_values(rule).values
    return WeightTable(rule, "q1_pow", float(s), q**s if s else np.ones_like(q))


def dist_pow_values(s, rule):
    """``|x|^{2s}``."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    r = batch_distance(rule.group, rule.nodes)
    return WeightTable(rule, "dist_pow", float(s), r ** (2 * s) if s else np.ones_like(r))


def weight_values(kind, s, rule):
    if kind == "q1":
        return q1_values(rule)
    if kind == "qs":
        if s != int(s):
            raise ValueError("q_s needs integer s")
        return qs_values(int(s), rule)
    if kind == "q1_pow":
        return q1_pow_values(s, rule)
    if kind == "dist_pow":
        return dist_pow_values(s, rule)
    raise ValueError(f"unknown weight kind {kind!r}; choose from {WEIGHT_KINDS}")


# -- difference side ---------------------------------------------------------
def _require_margin(sigma, s, allow_shrink):
    if s > 0 and sigma.margin < s and not allow_shrink:
        raise MarginError(f"order-{s} norm needs margin >= {s}; symbol has {sigma.margin}")


def _diffs(sigma, s, allow_shrink):
    _require_margin(sigma, s, allow_shrink)
    return delta_all(sigma, s, shrink=True if allow_shrink and sigma.margin < s else None)


def hs_norm_diffside(sigma, s, allow_shrink=False):
    """Difference-side ``H^s`` seminorm (integer ``s``)."""
    s = int(s)
    if s == 0:
        return l2_norm(sigma)
    G = sigma.group
    tot = 0.0
    for field in _diffs(sigma, s, allow_shrink).values():
        tot += sum(reps.dim(G, p) * np.vdot(M, M).real for p, M in field.entries.items())
    return math.sqrt(tot)


def linfs_norm(sigma, s, allow_shrink=False):
    """``max_{|alpha| = s} sup_pi ||Delta^alpha sigma(pi)||_op``."""
    s = int(s)
    if s == 0:
        return linf_norm(sigma)
    return max((linf_norm(f) for f in _diffs(sigma, s, allow_shrink).values()), default=0.0)


def trace_norm(M):
    return float(np.linalg.svd(M, compute_uv=False).sum())


def l1s_norm(sigma, s0, allow_shrink=False):
    """``sum_{|alpha| = s0} sum_pi d_pi ||Delta^alpha sigma(pi)||_tr``."""
    s0 = int(s0)
    G = sigma.group
    if s0 == 0:
        return sum(reps.dim(G, p) * trace_norm(M) for p, M in sigma.entries.items())
    tot = 0.0
    for field in _diffs(sigma, s0, allow_shrink).values():
        tot += sum(reps.dim(G, p) * trace_norm(M) for p, M in field.entries.items())
    return tot


def ldot_norm(sigma, s, p, allow_shrink=False):
    """Order-``s`` difference norm with ``p`` in {1, 2, inf} (trace, HS, operator)."""
    if p == 2:
        return hs_norm_diffside(sigma, s, allow_shrink)
    if math.isinf(p):
        return linfs_norm(sigma, s, allow_shrink)
    if p == 1:
        return l1s_norm(sigma, s, allow_shrink)
    raise ValueError("p must be 1, 2 or inf")


# -- kernel side -------------------------------------------------------------
def _weight_degree(kind, s):
    return int(math.ceil(s)) if kind in ("q1", "qs", "q1_pow") else int(math.ceil(s)) + 2


def _exact_weight(kind, s):
    return kind in ("q1", "qs") or (kind == "q1_pow" and float(s).is_integer())


def kernel_side_value(sigma, s, weight="q1_pow", rule=None):
    """``(value, rule)`` for the weighted ``L^2`` norm of ``F^{-1} sigma``."""
    if weight == "q1":
        s = 1
    if rule is None:
        rule = rule_for_band(sigma.group, sigma.band, extra=_weight_degree(weight, s))
    f = inverse_transform(sigma, rule)
    w = weight_values(weight, s, rule).values
    val = float(np.sqrt(max(rule.integrate(w * np.abs(f.values) ** 2).real, 0.0)))
    return val, rule


def hs_norm_kernelside(sigma, s, weight="q1_pow", rule=None):
    """``||F^{-1} sigma||_{L^2(w)}`` for ``w`` in ``q1_pow`` (canonical), ``qs``, ``dist_pow``."""
    return kernel_side_value(sigma, s, weight, rule)[0]


def kernelside_error_estimate(sigma, s, weight="q1_pow", rule=None):
    """Refinement estimate: change of the norm when the quadrature degree is doubled.

    Zero (not computed) when the weight is a trigonometric polynomial and the
    rule is exact for the integrand.
    """
    val, rule = kernel_side_value(sigma, s, weight, rule)
    if _exact_weight(weight, s):
        return val, 0.0
    deg = rule.exact_degree
    fine_deg = tuple(2 * d for d in deg) if isinstance(deg, tuple) else 2 * deg
    fine = quadrature_for_degree(sigma.group, fine_deg)
    fine_val = kernel_side_value(sigma, s, weight, fine)[0]
    return val, abs(fine_val - val)


def weighted_sup(f, s0):
    """``max_k |x_k|^{s0} |f(x_k)|`` over the grid."""
    r = batch_distance(f.rule.group, f.rule.nodes)
    return float(np.max(r**s0 * np.abs(f.values)))


def weighted_l1(f, s):
    """``sum_k w_k |x_k|^s |f(x_k)|``."""
    r = batch_distance(f.rule.group, f.rule.nodes)
    return float(f.rule.integrate(r**s * np.abs(f.values)).real)


# -- reports -----------------------------------------------------------------
@dataclass
class NormReport:
    norm_kind: str
    s: float
    value: float
    band: float
    margin: int
    quadrature_error_estimate: float = 0.0

    def to_json(self):
        return asdict(self)


def norm_report(sigma, kind, s):
    """One JSON-ready row; ``kind`` is ``diff``, ``linf_s``, ``l1_s`` or a kernel weight."""
    err = 0.0
    if kind == "diff":
        val = hs_norm_diffside(sigma, s)
    elif kind == "linf_s":
        val = linfs_norm(sigma, s)
    elif kind == "l1_s":
        val = l1s_norm(sigma, s)
    elif kind in WEIGHT_KINDS:
        val, err = kernelside_error_estimate(sigma, s, kind)
    else:
        raise ValueError(f"unknown norm kind {kind!r}")
    return NormReport(kind, float(s), float(val), sigma.band, sigma.margin, float(err))


__all__ = [
    "WeightTable", "q1_values", "qs_values", "q1_pow_values", "dist_pow_values", "weight_values",
    "hs_norm_diffside", "hs_norm_kernelside", "kernelside_error_estimate", "linfs_norm",
    "l1s_norm", "ldot_norm", "trace_norm", "weighted_sup", "weighted_l1", "NormReport",
    "norm_report", "GridFunction",
]
