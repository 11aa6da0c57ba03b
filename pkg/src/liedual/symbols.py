"""Difference operators and Fourier multipliers on truncated duals.

For a fundamental ``phi`` the difference operator is

    (Delta_phi sigma)(pi) = sigma(phi (x) pi) - I_phi (x) sigma(pi),

where ``sigma(phi (x) pi) = U^* blockdiag(sigma(rho)) U`` over the summands of
``phi (x) pi``. Applied to a field with word ``w`` it returns a field with word
``w + (phi,)``; the tensor factor order is ``(w, phi, pi)``.

Band edge: a field with ``margin >= 1`` is read as zero outside its domain, so
the difference is computed on the same domain and the margin drops by one. A
field with ``margin == 0`` stands for a truncated global symbol and the
difference is only computed on the interior (labels whose neighbours all lie in
the domain).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import kernels, reps
from .fields import HigherField, MarginError, Symbol, interior
from .fourier import GridFunction, check_rule, forward_transform, inverse_transform, plancherel_norm_sq


# -- extension and differences ----------------------------------------------
def extend_at(field, phi, pi):
    """``field(phi (x) pi)`` on ``H_word (x) H_phi (x) H_pi``."""
    G = field.group
    dec = reps.decompose_fund_tensor(G, phi, pi)
    W = field.word_dim
    D = dec.size
    dom = _domain_set(field)
    B = np.zeros((W, D, W, D), dtype=np.complex128)
    nonzero = False
    for rho, off in zip(dec.summands, dec.offsets):
        dr = reps.dim(G, rho)
        if rho not in dom:
            if field.margin >= 1:
                continue
            raise MarginError(f"summand {rho} of {phi} (x) {pi} is outside the band; "
                              f"needs margin >= 1 (field has {field.margin})")
        M = field.entries.get(rho)
        if M is None:
            continue
        B[:, off:off + dr, :, off:off + dr] = M.reshape(W, dr, W, dr)
        nonzero = True
    if not nonzero:
        return np.zeros((W * D, W * D), dtype=np.complex128)
    return kernels.conjugate_blocks(B, np.ascontiguousarray(dec.intertwiner))


def _domain_set(field):
    return frozenset(field.domain)


def insert_identity(M, W, d_phi, d_pi):
    """``I_phi`` inserted between the word factor and the pi factor of ``M``."""
    M4 = M.reshape(W, d_pi, W, d_pi)
    R = np.einsum("wivj,ab->waivbj", M4, np.eye(d_phi))
    n = W * d_phi * d_pi
    return R.reshape(n, n)


def delta_at(phi, field, pi):
    """``(Delta_phi field)(pi)`` as a matrix."""
    G = field.group
    W = field.word_dim
    ext = extend_at(field, phi, pi)
    M = field.entries.get(pi)
    if M is not None:
        ext = ext - insert_identity(M, W, reps.dim(G, phi), reps.dim(G, pi))
    return ext


def delta(phi, field, shrink=None):
    """Apply ``Delta_phi`` to a symbol or higher field.

    ``shrink`` (default: only when the margin is 0) restricts the result to the
    interior of the domain instead of reading the field as zero outside it.
    """
    G = field.group
    if phi not in reps.fundamental_set(G):
        raise reps.NotFundamentalError(f"{phi!r} is not fundamental for {G}")
    if shrink is None:
        shrink = field.margin == 0
    if shrink:
        domain = interior(G, field.domain, 1)
        if not domain:
            raise MarginError("difference operator has an empty interior on this band")
        margin = 0
    else:
        if field.margin < 1:
            raise MarginError("field has margin 0; pass shrink=True")
        domain = field.domain
        margin = field.margin - 1
    support = set(field.entries)
    entries = {}
    for pi in domain:
        if pi not in support and not (reps.neighbors(G, pi) & support):
            continue
        M = delta_at(phi, field, pi)
        if np.any(M != 0):
            entries[pi] = M
    out = HigherField(G, field.band, entries, word=field.word + (phi,), domain=domain,
                      margin=None if margin > 0 else 0, check=False)
    if margin > 0 and out.margin < margin:
        out.margin = margin
    return out


def multi_indices(G, order):
    """All multi-indices ``alpha`` (counts per fundamental) with ``|alpha| = order``."""
    f = len(reps.fundamental_set(G))
    out = []
    for combo in itertools.combinations_with_replacement(range(f), order):
        a = [0] * f
        for i in combo:
            a[i] += 1
        out.append(tuple(a))
    return out


def _check_word_margin(field, order, shrink):
    if shrink is None:
        shrink = field.margin == 0
    if not shrink and field.margin < order:
        raise MarginError(f"order {order} differences need margin >= {order}; field has {field.margin}")
    return shrink


def delta_word(alpha, sigma, shrink=None):
    """``Delta^alpha sigma`` in canonical order (fundamentals in ``fundamental_set`` order)."""
    G = sigma.group
    fund = reps.fundamental_set(G)
    alpha = tuple(alpha)
    if len(alpha) != len(fund):
        raise ValueError(f"multi-index needs {len(fund)} entries")
    _check_word_margin(sigma, sum(alpha), shrink)
    out = sigma
    for phi, k in zip(fund, alpha):
        for _ in range(k):
            out = delta(phi, out)
    return out


def delta_all(sigma, order, shrink=None):
    """``{alpha: Delta^alpha sigma}`` for every ``|alpha| = order`` (shared prefixes)."""
    G = sigma.group
    fund = reps.fundamental_set(G)
    _check_word_margin(sigma, order, shrink)
    out = {}

    def walk(field, start, counts, depth):
        if depth == order:
            out[tuple(counts)] = field
            return
        for i in range(start, len(fund)):
            nxt = delta(fund[i], field)
            counts[i] += 1
            walk(nxt, i, counts, depth + 1)
            counts[i] -= 1

    walk(sigma, 0, [0] * len(fund), 0)
    return out


def swap_factors(M, dims, i, j):
    """Permute tensor factors ``i`` and ``j`` of a matrix on ``(x)_k C^{dims[k]}``."""
    n = len(dims)
    T = M.reshape(tuple(dims) * 2)
    perm = list(range(n))
    perm[i], perm[j] = perm[j], perm[i]
    T = T.transpose(perm + [p + n for p in perm])
    size = int(np.prod(dims))
    return T.reshape(size, size)


def leibniz_residual(phi, s1, s2, pi, relative=False):
    """HS norm of ``Delta(s1 s2) - Delta(s1) s2(I (x) pi) - s1(phi (x) pi) Delta(s2)`` at pi."""
    G = s1.group
    W = s1.word_dim
    dphi, dpi = reps.dim(G, phi), reps.dim(G, pi)
    prod = s1 * s2
    lhs = delta_at(phi, prod, pi)
    d1 = delta_at(phi, s1, pi)
    d2 = delta_at(phi, s2, pi)
    e1 = extend_at(s1, phi, pi)
    i2 = insert_identity(s2.entry(pi), W, dphi, dpi)
    res = float(np.linalg.norm(lhs - d1 @ i2 - e1 @ d2))
    if not relative:
        return res
    scale = (np.linalg.norm(lhs) + np.linalg.norm(d1) * np.linalg.norm(i2, 2)
             + np.linalg.norm(e1, 2) * np.linalg.norm(d2))
    return res / scale if scale > 0 else res


@dataclass(frozen=True)
class AnnihilationReport:
    s: int
    max_norm: float
    tolerance: float

    @property
    def verdict(self):
        return "annihilated" if self.max_norm <= self.tolerance else "not annihilated"

    @property
    def annihilated(self):
        return self.max_norm <= self.tolerance

    def to_json(self):
        return {"s": self.s, "max_norm": self.max_norm, "tolerance": self.tolerance, "verdict": self.verdict}


def annihilation_test(sigma, s, tol=1e-10, shrink=None):
    """Largest ``||Delta^alpha sigma(pi)||_op`` over ``|alpha| = s`` and the interior."""
    if s < 1:
        raise ValueError("s must be positive")
    best = 0.0
    for field in delta_all(sigma, s, shrink=shrink).values():
        for M in field.entries.values():
            best = max(best, float(np.linalg.norm(M, 2)))
    return AnnihilationReport(int(s), best, float(tol))


def polynomial_projection(sigma, s):
    """Least-squares projection onto ``span{F_G(X^beta): |beta| <= s - 1}``.

    Returns ``(projection, relative_residual)`` with the residual measured in the
    Plancherel norm over the domain.
    """
    G = sigma.group
    dom = sigma.domain
    cols = []
    basis = []
    for k in range(s):
        for beta in itertools.product(range(G.dim), repeat=k):
            basis.append(beta)
            cols.append(_flatten(fourier_of_X(G, sigma.band, beta, domain=dom), dom))
    A = np.stack(cols, axis=1)
    b = _flatten(sigma, dom)
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    fit = A @ coef
    nb = np.linalg.norm(b)
    rel = float(np.linalg.norm(b - fit) / nb) if nb > 0 else 0.0
    proj = sum((c * fourier_of_X(G, sigma.band, beta, domain=dom) for c, beta in zip(coef, basis)),
               0 * identity(G, sigma.band, domain=dom))
    return proj, rel


def _flatten(field, dom):
    G = field.group
    return np.concatenate([np.sqrt(reps.dim(G, p)) * field.entry(p).ravel() for p in dom])


# -- multiplier operators ------------------------------------------------------
def op_matrix(sigma, band=None, method="block", rule=None):
    """Matrix of ``Op(sigma)`` in the Peter-Weyl basis ``sqrt(d_pi) pi_ij``.

    Basis order: labels of ``enumerate_band(band)``, then ``(i, j)`` row-major.
    ``method="quadrature"`` assembles the matrix from :func:`apply` and Haar
    quadrature instead of the block formula ``I (x) sigma(pi)``.
    """
    G = sigma.group
    band = sigma.band if band is None else band
    if band > sigma.band + 1e-12:
        raise ValueError("op_matrix band exceeds the symbol band")
    labels = reps.enumerate_band(G, band)
    if method == "block":
        blocks = [np.kron(np.eye(reps.dim(G, p)), sigma.entry(p)) for p in labels]
        n = sum(b.shape[0] for b in blocks)
        out = np.zeros((n, n), dtype=np.complex128)
        k = 0
        for b in blocks:
            m = b.shape[0]
            out[k:k + m, k:k + m] = b
            k += m
        return out
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    from .fourier import rule_for_band

    rule = rule_for_band(G, sigma.band) if rule is None else rule
    cols = []
    for p in labels:
        T = reps.rep_table(rule, p)
        d = reps.dim(G, p)
        cols.append(np.sqrt(d) * T.reshape(rule.size, d * d))
    E = np.concatenate(cols, axis=1)
    out = np.empty((E.shape[1], E.shape[1]), dtype=np.complex128)
    for b in range(E.shape[1]):
        g = apply(sigma, GridFunction(rule, E[:, b]), check=False)
        out[:, b] = (E.conj() * rule.weights[:, None]).T @ g.values
    return out


def apply(sigma, f, check=True):
    """``Op(sigma) f`` on the grid of ``f``."""
    rule = f.rule
    check_rule(rule, sigma.band)
    fh = forward_transform(f, sigma.band, check=False)
    if check:
        total = f.l2_norm_sq()
        kept = plancherel_norm_sq(fh)
        if total - kept > 1e-8 * max(total, 1e-300):
            raise ValueError("function is not band-limited to the symbol band")
    prod = Symbol(sigma.group, sigma.band,
                  {p: sigma.entry(p) @ M for p, M in fh.entries.items() if p in sigma.entries},
                  domain=sigma.domain, check=False, margin=0)
    return inverse_transform(prod, rule)


def linf_norm(field):
    return max((float(np.linalg.norm(M, 2)) for M in field.entries.values()), default=0.0)


def l2_norm(field):
    G = field.group
    return float(np.sqrt(sum(reps.dim(G, p) * np.vdot(M, M).real for p, M in field.entries.items())))


# -- constructors -----------------------------------------------------------
def identity(G, band, domain=None):
    dom = reps.enumerate_band(G, band) if domain is None else tuple(domain)
    return Symbol(G, band, {p: np.eye(reps.dim(G, p), dtype=np.complex128) for p in dom},
                  domain=dom, check=False, margin=0)


def fourier_of_X(G, band, beta, domain=None):
    """``F_G(X^beta)(pi) = pi(X_beta_1) ... pi(X_beta_k)`` (generator indices 0-based)."""
    dom = reps.enumerate_band(G, band) if domain is None else tuple(domain)
    entries = {}
    for p in dom:
        d = reps.dim(G, p)
        M = np.eye(d, dtype=np.complex128)
        for j in beta:
            M = M @ reps.infinitesimal(G, p, j)
        entries[p] = M
    return Symbol(G, band, entries, domain=dom, check=False, margin=0)


def spectral(f, G, band, margin=None, domain=None):
    """``f(lambda_pi) I_pi`` over the band; the margin is read off the support unless given."""
    dom = reps.enumerate_band(G, band) if domain is None else tuple(domain)
    entries = {}
    for p in dom:
        v = complex(f(reps.casimir_eigenvalue(G, p)))
        if v != 0:
            entries[p] = v * np.eye(reps.dim(G, p), dtype=np.complex128)
    return Symbol(G, band, entries, domain=dom, check=False, margin=margin)


def random_symbol(G, band, seed=0, decay=0.0, margin=0, hermitian=False, rng=None):
    """Gaussian entries scaled by ``(1 + lambda)^(-decay)``, zero outside the margin interior."""
    rng = np.random.default_rng(seed) if rng is None else rng
    dom = reps.enumerate_band(G, band)
    keep = set(interior(G, dom, margin)) if margin > 0 else set(dom)
    entries = {}
    for p in dom:
        d = reps.dim(G, p)
        M = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
        if hermitian:
            M = (M + M.conj().T) / 2
        if p in keep:
            entries[p] = M * (1.0 + reps.casimir_eigenvalue(G, p)) ** (-decay)
    return Symbol(G, band, entries, domain=dom, check=False, margin=None if margin > 0 else 0)
