"""Inner loops that dominate runtime.

Every kernel exists twice: ``*_numba`` (explicit loops, compiled) and
``*_numpy`` (vectorised). The public name is bound to one of them according to
:data:`liedual._accel.USE_NUMBA`; both flavours stay importable so that
``benchmarks/bench_kernels.py`` can time them against each other.

SU(2) conventions: the spin-l/2 representation acts on C^{l+1} with basis
index ``k = 0..l`` carrying weight ``m = l/2 - k``. The representation of
degree ``l+1`` is the top summand of ``g (x) pi_l(g)``, extracted with the
Condon-Shortley spin-1/2 Clebsch-Gordan coefficients

    A_K = sqrt((d - K) / d),   B_K = sqrt(K / d),   d = l + 1,

so that ``pi_{l+1}(g)[K, K'] = sum_{a,b} c_a(K) c_b(K') g[a, b] pi_l(g)[K - a, K' - b]``
with ``c_0 = A`` and ``c_1 = B``. Each step is unitary, so the recursion is
stable for large degrees (no factorials, no Jacobi polynomials).
"""
import numpy as np

from ._accel import USE_NUMBA, jit


def _cg_top(d):
    k = np.arange(d + 1, dtype=np.float64)
    return np.sqrt((d - k) / d), np.sqrt(k / d)


def su2_step_numpy(D, g):
    """One degree-raising step for a batch: (N, d, d) -> (N, d+1, d+1)."""
    n, d, _ = D.shape
    a, b = _cg_top(d)
    out = np.zeros((n, d + 1, d + 1), dtype=np.complex128)
    out[:, :d, :d] += np.outer(a[:d], a[:d]) * (g[:, 0, 0, None, None] * D)
    out[:, :d, 1:] += np.outer(a[:d], b[1:]) * (g[:, 0, 1, None, None] * D)
    out[:, 1:, :d] += np.outer(b[1:], a[:d]) * (g[:, 1, 0, None, None] * D)
    out[:, 1:, 1:] += np.outer(b[1:], b[1:]) * (g[:, 1, 1, None, None] * D)
    return out


@jit
def su2_step_numba(D, g):
    n, d, _ = D.shape
    a = np.empty(d + 1)
    b = np.empty(d + 1)
    for k in range(d + 1):
        a[k] = np.sqrt((d - k) / d)
        b[k] = np.sqrt(k / d)
    out = np.zeros((n, d + 1, d + 1), dtype=np.complex128)
    for i in range(n):
        g00 = g[i, 0, 0]
        g01 = g[i, 0, 1]
        g10 = g[i, 1, 0]
        g11 = g[i, 1, 1]
        for r in range(d + 1):
            for c in range(d + 1):
                acc = 0j
                if r < d and c < d:
                    acc += a[r] * a[c] * g00 * D[i, r, c]
                if r < d and c > 0:
                    acc += a[r] * b[c] * g01 * D[i, r, c - 1]
                if r > 0 and c < d:
                    acc += b[r] * a[c] * g10 * D[i, r - 1, c]
                if r > 0 and c > 0:
                    acc += b[r] * b[c] * g11 * D[i, r - 1, c - 1]
                out[i, r, c] = acc
    return out


def su2_characters_numpy(c, lmax):
    """Characters chi_l = U_l(c) for l = 0..lmax, where c = tr(g) / 2.

    Chebyshev polynomials of the second kind via their three-term recurrence.
    Returns an array of shape (lmax + 1, N).
    """
    c = np.asarray(c, dtype=np.float64)
    out = np.empty((lmax + 1,) + c.shape)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = 2.0 * c
    for l in range(2, lmax + 1):
        out[l] = 2.0 * c * out[l - 1] - out[l - 2]
    return out


@jit
def su2_characters_numba(c, lmax):
    n = c.shape[0]
    out = np.empty((lmax + 1, n))
    for i in range(n):
        x = c[i]
        u0 = 1.0
        out[0, i] = u0
        if lmax >= 1:
            u1 = 2.0 * x
            out[1, i] = u1
            for l in range(2, lmax + 1):
                u2 = 2.0 * x * u1 - u0
                out[l, i] = u2
                u0 = u1
                u1 = u2
    return out


def conjugate_blocks_numpy(B, U):
    """Return (I_W (x) U^*) B (I_W (x) U) for B of shape (W, D, W, D)."""
    W, D = B.shape[0], B.shape[1]
    X = B.transpose(0, 2, 1, 3)  # (W, W, D, D)
    Y = U.conj().T @ X @ U
    return Y.transpose(0, 2, 1, 3).reshape(W * D, W * D)


@jit
def conjugate_blocks_numba(B, U):
    W = B.shape[0]
    D = B.shape[1]
    Uh = U.conj().T.copy()
    out = np.empty((W * D, W * D), dtype=np.complex128)
    for w in range(W):
        for v in range(W):
            X = np.ascontiguousarray(B[w, :, v, :])
            Y = Uh @ X @ U
            out[w * D:(w + 1) * D, v * D:(v + 1) * D] = Y
    return out


if USE_NUMBA:
    su2_step = su2_step_numba
    su2_characters = su2_characters_numba
    conjugate_blocks = conjugate_blocks_numba
else:
    su2_step = su2_step_numpy
    su2_characters = su2_characters_numpy
    conjugate_blocks = conjugate_blocks_numpy


def su2_rep_tower(g, lmax, step=None):
    """Yield ``(l, pi_l(g))`` for l = 0..lmax over a batch g of shape (N, 2, 2)."""
    step = su2_step if step is None else step
    g = np.ascontiguousarray(g, dtype=np.complex128)
    D = np.ones((g.shape[0], 1, 1), dtype=np.complex128)
    yield 0, D
    for l in range(1, lmax + 1):
        D = step(D, g)
        yield l, D
