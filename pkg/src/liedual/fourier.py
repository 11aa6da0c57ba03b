"""Group Fourier transform between grid functions and coefficient fields.

Conventions::

    f^(pi)  = int_G f(x) pi(x)^* dx
    f(x)    = sum_pi d_pi tr(pi(x) f^(pi))
    (f1 * f2)^ = f2^ f1^,   (f1 * f2)(x) = int_G f1(y) f2(y^-1 x) dy
"""
from __future__ import annotations

import csv
import io
import math

import numpy as np

from . import reps
from .fields import CoefficientField, Symbol
from .groups import quadrature_for_degree


class InsufficientQuadratureError(ValueError):
    pass


class GridFunction:
    """Samples of a function at the nodes of a quadrature rule."""

    __slots__ = ("rule", "values")

    def __init__(self, rule, values):
        values = np.asarray(values, dtype=np.complex128).reshape(-1)
        if values.shape[0] != rule.size:
            raise ValueError(f"expected {rule.size} values, got {values.shape[0]}")
        self.rule = rule
        self.values = values

    @property
    def group(self):
        return self.rule.group

    def integral(self):
        return complex(self.rule.integrate(self.values))

    def lp_norm(self, p):
        a = np.abs(self.values)
        if math.isinf(p):
            return float(a.max())
        return float(self.rule.integrate(a**p).real ** (1.0 / p))

    def l2_norm_sq(self):
        return float(self.rule.integrate(np.abs(self.values) ** 2).real)

    def __add__(self, other):
        _same_rule(self, other)
        return GridFunction(self.rule, self.values + other.values)

    def __sub__(self, other):
        _same_rule(self, other)
        return GridFunction(self.rule, self.values - other.values)

    def __mul__(self, c):
        return GridFunction(self.rule, self.values * c)

    __rmul__ = __mul__


def _same_rule(f, g):
    if f.rule is not g.rule:
        raise ValueError("grid functions live on different quadrature rules")


def band_degree(G, band):
    """Largest label degree in the band (per factor for products)."""
    return reps.max_degree(G, reps.enumerate_band(G, band))


def _scale_degree(deg, k, extra=0):
    if isinstance(deg, tuple):
        return tuple(k * d + extra for d in deg)
    return k * deg + extra


def _covers(rule_deg, need):
    if isinstance(need, tuple):
        rd = rule_deg if isinstance(rule_deg, tuple) else (rule_deg,) * len(need)
        return all(a >= b for a, b in zip(rd, need))
    if isinstance(rule_deg, tuple):
        return min(rule_deg) >= need
    return rule_deg >= need


def rule_for_band(G, band, extra=0):
    """Default rule exact for products of two coefficients in the band plus ``extra`` degrees."""
    return quadrature_for_degree(G, _scale_degree(band_degree(G, band), 2, extra))


def check_rule(rule, band, extra=0):
    need = _scale_degree(band_degree(rule.group, band), 2, extra)
    if not _covers(rule.exact_degree, need):
        raise InsufficientQuadratureError(
            f"rule exact to degree {rule.exact_degree}, band {band} needs {need}")


def forward_transform(f, band, check=True):
    """Fourier coefficients of a grid function on the band (a :class:`CoefficientField`)."""
    rule = f.rule
    G = rule.group
    if check:
        check_rule(rule, band)
    wf = rule.weights * f.values
    entries = {}
    for p in reps.enumerate_band(G, band):
        T = reps.rep_table(rule, p)
        # sum_k w_k f_k conj(pi(x_k))^T
        entries[p] = np.einsum("n,nji->ij", wf, T.conj())
    return CoefficientField(G, band, entries, check=False)


def _is_scalar(M):
    return M.shape[0] == 1 or np.array_equal(M, M[0, 0] * np.eye(M.shape[0]))


def synthesize(field, G, nodes, size):
    """Evaluate ``sum_pi d_pi tr(pi(x) c(pi))`` on a batch of elements."""
    out = np.zeros(size, dtype=np.complex128)
    central = [p for p, M in field.entries.items() if _is_scalar(M)]
    if central:
        chi = reps.characters_batch(G, central, nodes)
        coef = np.array([reps.dim(G, p) * field.entries[p][0, 0] for p in central])
        out += coef @ chi
    for p, M in field.entries.items():
        if M.shape[0] == 1 or _is_scalar(M):
            continue
        T = reps.evaluate_batch(G, p, nodes)
        out += reps.dim(G, p) * np.einsum("nij,ji->n", T, M)
    return out


def inverse_transform(field, rule):
    """Synthesize a coefficient field at the nodes of ``rule``."""
    G = rule.group
    if field.group != G:
        raise ValueError("field and rule belong to different groups")
    out = np.zeros(rule.size, dtype=np.complex128)
    central = [p for p, M in field.entries.items() if _is_scalar(M)]
    if central:
        chi = reps.characters_batch(G, central, rule.nodes)
        coef = np.array([reps.dim(G, p) * field.entries[p][0, 0] for p in central])
        out += coef @ chi
    for p, M in field.entries.items():
        if _is_scalar(M):
            continue
        T = reps.rep_table(rule, p)
        out += reps.dim(G, p) * np.einsum("nij,ji->n", T, M)
    return GridFunction(rule, out)


def plancherel_norm_sq(field):
    G = field.group
    return float(sum(reps.dim(G, p) * np.vdot(M, M).real for p, M in field.entries.items()))


def convolve(f, g, band):
    """Coefficients of ``f * g``: ``g^(pi) f^(pi)``."""
    _same_rule(f, g)
    fh = forward_transform(f, band)
    gh = forward_transform(g, band)
    return CoefficientField(f.group, band, {p: gh.entry(p) @ fh.entry(p) for p in fh.domain}, check=False)


def convolve_direct(f, g, band):
    """Reference convolution at the nodes by a second quadrature (small grids only).

    ``g`` must be band-limited to ``band`` so it can be evaluated off the grid.
    """
    from .groups import batch_inverse, batch_multiply, batch_take

    rule = f.rule
    G = rule.group
    inv = batch_inverse(G, rule.nodes)
    coeffs = forward_transform(g, band)
    out = np.empty(rule.size, dtype=np.complex128)
    for k in range(rule.size):
        x = batch_take(G, rule.nodes, k)
        pts = batch_multiply(G, inv, _broadcast(G, x, rule.size))
        gv = synthesize(coeffs, G, pts, rule.size)
        out[k] = np.sum(rule.weights * f.values * gv)
    return GridFunction(rule, out)


def _broadcast(G, x, n):
    if G.kind == "product":
        return tuple(_broadcast(F, xi, n) for F, xi in zip(G.factors, x))
    x = np.asarray(x)
    return np.broadcast_to(x, (n,) + x.shape).copy()


# -- I/O -----------------------------------------------------------------
def grid_to_csv(f):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node", "re", "im"])
    for k, v in enumerate(f.values):
        w.writerow([k, repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def grid_from_csv(text, rule):
    """Parse ``node,re,im`` rows (header optional). Raises ValueError with a line number."""
    values = np.zeros(rule.size, dtype=np.complex128)
    seen = np.zeros(rule.size, dtype=bool)
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if lineno == 1 and row[0].strip().lower() in ("node", "index", "k"):
            continue
        if len(row) not in (2, 3):
            raise ValueError(f"line {lineno}: expected 'node,re,im', got {len(row)} fields")
        try:
            k = int(row[0])
            re = float(row[1])
            im = float(row[2]) if len(row) == 3 else 0.0
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if not 0 <= k < rule.size:
            raise ValueError(f"line {lineno}: node index {k} out of range [0, {rule.size})")
        values[k] = re + 1j * im
        seen[k] = True
    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0])
        raise ValueError(f"missing value for node {missing} (rule has {rule.size} nodes)")
    return GridFunction(rule, values)


__all__ = [
    "GridFunction", "CoefficientField", "Symbol", "InsufficientQuadratureError",
    "forward_transform", "inverse_transform", "synthesize", "plancherel_norm_sq",
    "convolve", "convolve_direct", "rule_for_band", "band_degree", "check_rule",
    "grid_to_csv", "grid_from_csv",
]
