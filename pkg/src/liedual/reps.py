"""Irreducible representations of the group backends.

Labels are plain hashable values:

* torus ``T^d``: tuple of ``d`` integers (the character ``x -> e^{i<l, x>}``)
* SU(2): nonnegative integer ``l`` (dimension ``l + 1``, spin ``l/2``)
* product: tuple of factor labels

On SU(2), ``pi_1(g) = g`` and ``pi_l(X_k) = i J_k`` with the standard spin
matrices in the basis of decreasing weight; higher ``pi_l`` come from the
Clebsch-Gordan recursion in :mod:`liedual.kernels`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .groups import Group, GroupElement, GroupMismatchError, batch_size

# table caches larger than this (bytes) are recomputed on demand instead
TABLE_CACHE_LIMIT = 512 * 2**20


class NotFundamentalError(ValueError):
    pass


# -- labels ------------------------------------------------------------
def canonical_label(G, label):
    if G.kind == "torus":
        if isinstance(label, (int, np.integer)):
            label = (int(label),)
        label = tuple(int(v) for v in label)
        if len(label) != G.d:
            raise ValueError(f"torus:{G.d} label needs {G.d} entries, got {label}")
        return label
    if G.kind == "su2":
        label = int(label)
        if label < 0:
            raise ValueError("SU(2) labels are nonnegative")
        return label
    label = tuple(label)
    if len(label) != len(G.factors):
        raise ValueError("product label has the wrong number of factors")
    return tuple(canonical_label(F, x) for F, x in zip(G.factors, label))


def trivial_label(G):
    if G.kind == "torus":
        return (0,) * G.d
    if G.kind == "su2":
        return 0
    return tuple(trivial_label(F) for F in G.factors)


def label_to_json(G, label):
    if G.kind == "torus":
        return {"torus": list(label)}
    if G.kind == "su2":
        return {"su2": int(label)}
    return {"product": [label_to_json(F, x) for F, x in zip(G.factors, label)]}


def label_from_json(G, obj):
    if G.kind == "torus":
        return canonical_label(G, obj["torus"])
    if G.kind == "su2":
        return canonical_label(G, obj["su2"])
    return tuple(label_from_json(F, x) for F, x in zip(G.factors, obj["product"]))


def label_degree(G, label):
    """Size of a label for quadrature purposes (per factor for products)."""
    if G.kind == "torus":
        return max((abs(v) for v in label), default=0)
    if G.kind == "su2":
        return label
    return tuple(label_degree(F, x) for F, x in zip(G.factors, label))


def max_degree(G, labels):
    labels = list(labels)
    if G.kind != "product":
        return max((label_degree(G, p) for p in labels), default=0)
    degs = [label_degree(G, p) for p in labels]
    return tuple(max((_flat_max(d[i]) for d in degs), default=0) for i in range(len(G.factors)))


def _flat_max(d):
    return max(_flat_max(x) for x in d) if isinstance(d, tuple) else d


# -- basic invariants ----------------------------------------------------
@lru_cache(maxsize=None)
def dim(G, label):
    if G.kind == "torus":
        return 1
    if G.kind == "su2":
        return label + 1
    return math.prod(dim(F, x) for F, x in zip(G.factors, label))


@lru_cache(maxsize=None)
def casimir_eigenvalue(G, label):
    """Eigenvalue of the Laplace-Beltrami operator -sum X_j^2 on the irrep."""
    if G.kind == "torus":
        return float(sum(v * v for v in label))
    if G.kind == "su2":
        return label * (label + 2) / 4.0
    return float(sum(casimir_eigenvalue(F, x) for F, x in zip(G.factors, label)))


def sort_key(G, label):
    return (casimir_eigenvalue(G, label), _lex(G, label))


def _lex(G, label):
    if G.kind == "torus":
        return label
    if G.kind == "su2":
        return (label,)
    return tuple(_lex(F, x) for F, x in zip(G.factors, label))


@lru_cache(maxsize=64)
def enumerate_band(G, cutoff):
    """All labels with Laplacian eigenvalue <= cutoff, in canonical order."""
    if cutoff < 0:
        raise ValueError("band must be nonnegative")
    labels = _labels_upto(G, float(cutoff) + 1e-9)
    return tuple(sorted(labels, key=lambda p: sort_key(G, p)))


def _labels_upto(G, cutoff):
    if G.kind == "torus":
        r = int(math.floor(math.sqrt(cutoff)))
        rng = range(-r, r + 1)
        return [t for t in itertools.product(rng, repeat=G.d) if sum(v * v for v in t) <= cutoff]
    if G.kind == "su2":
        lmax = int(math.floor(-1 + math.sqrt(1 + 4 * cutoff)))
        return [l for l in range(lmax + 1) if l * (l + 2) / 4.0 <= cutoff]
    out = [()]
    for F in G.factors:
        nxt = []
        for partial in out:
            used = sum(casimir_eigenvalue(H, x) for H, x in zip(G.factors, partial))
            for lab in _labels_upto(F, cutoff - used):
                nxt.append(partial + (lab,))
        out = nxt
    return out


# -- fundamental representations ------------------------------------------
@lru_cache(maxsize=None)
def fundamental_set(G):
    if G.kind == "torus":
        out = []
        for j in range(G.d):
            for sgn in (1, -1):
                e = [0] * G.d
                e[j] = sgn
                out.append(tuple(e))
        return tuple(out)
    if G.kind == "su2":
        return (1,)
    out = []
    triv = [trivial_label(F) for F in G.factors]
    for i, F in enumerate(G.factors):
        for phi in fundamental_set(F):
            lab = list(triv)
            lab[i] = phi
            out.append(tuple(lab))
    return tuple(out)


def _fund_factor(G, phi):
    """For a product-group fundamental, the factor index carrying it."""
    for i, (F, x) in enumerate(zip(G.factors, phi)):
        if x != trivial_label(F):
            return i
    raise NotFundamentalError(f"{phi} is trivial")


@dataclass(frozen=True, eq=False)
class TensorDecomposition:
    """phi (x) pi  ~  sum of summands, via the unitary ``intertwiner``.

    ``U (phi (x) pi)(g) U^* = blockdiag(rho(g) for rho in summands)``.
    """

    left: object
    right: object
    summands: tuple
    intertwiner: np.ndarray
    offsets: tuple

    @property
    def size(self):
        return self.intertwiner.shape[0]


@lru_cache(maxsize=None)
def _su2_cg(l):
    d = l + 1
    U = np.zeros((2 * d, 2 * d))
    for K in range(d + 1):  # top summand, degree l + 1
        if K < d:
            U[K, 0 * d + K] = math.sqrt((d - K) / d)
        if K > 0:
            U[K, 1 * d + K - 1] = math.sqrt(K / d)
    for K in range(l):  # bottom summand, degree l - 1
        U[d + 1 + K, 0 * d + K + 1] = math.sqrt((K + 1) / d)
        U[d + 1 + K, 1 * d + K] = -math.sqrt((l - K) / d)
    return U.astype(np.complex128)


@lru_cache(maxsize=None)
def decompose_fund_tensor(G, phi, pi):
    """Irreducible decomposition of ``phi (x) pi`` with phi fundamental."""
    if phi not in fundamental_set(G):
        raise NotFundamentalError(f"{phi!r} is not a fundamental representation of {G}")
    if G.kind == "torus":
        rho = tuple(a + b for a, b in zip(phi, pi))
        return TensorDecomposition(phi, pi, (rho,), np.ones((1, 1), dtype=np.complex128), (0,))
    if G.kind == "su2":
        summands = (pi + 1, pi - 1) if pi >= 1 else (1,)
        U = _su2_cg(pi)
        return TensorDecomposition(phi, pi, summands, U, (0, pi + 2) if pi >= 1 else (0,))

    i = _fund_factor(G, phi)
    Fi = G.factors[i]
    sub = decompose_fund_tensor(Fi, phi[i], pi[i])
    dims = [dim(F, x) for F, x in zip(G.factors, pi)]
    d_lo = math.prod(dims[:i])
    d_hi = math.prod(dims[i + 1:])
    d_phi = dim(Fi, phi[i])
    blocks, summands, offsets, off = [], [], [], 0
    for r, rho_i in enumerate(sub.summands):
        d_rho = dim(Fi, rho_i)
        rows = sub.intertwiner[sub.offsets[r]:sub.offsets[r] + d_rho].reshape(d_rho, d_phi, dims[i])
        blk = np.einsum("pq,jab,st->pjsaqbt", np.eye(d_lo), rows, np.eye(d_hi))
        blocks.append(blk.reshape(d_lo * d_rho * d_hi, d_phi * d_lo * dims[i] * d_hi))
        lab = list(pi)
        lab[i] = rho_i
        summands.append(tuple(lab))
        offsets.append(off)
        off += d_lo * d_rho * d_hi
    return TensorDecomposition(phi, pi, tuple(summands), np.vstack(blocks), tuple(offsets))


@lru_cache(maxsize=None)
def neighbors(G, pi):
    """Labels reachable from pi in one fundamental tensor step."""
    out = set()
    for phi in fundamental_set(G):
        out.update(decompose_fund_tensor(G, phi, pi).summands)
    return frozenset(out)


# -- infinitesimal representation ----------------------------------------
@lru_cache(maxsize=None)
def _spin_matrices(l):
    j = l / 2.0
    m = j - np.arange(l + 1)
    jz = np.diag(m).astype(np.complex128)
    jp = np.zeros((l + 1, l + 1), dtype=np.complex128)
    for k in range(1, l + 1):
        # J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, index k -> k-1
        mm = m[k]
        jp[k - 1, k] = math.sqrt(j * (j + 1) - mm * (mm + 1))
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    return jx, jy, jz


def infinitesimal(G, label, j):
    """pi(X_j) for the j-th orthonormal Lie-algebra generator (0-based)."""
    if not 0 <= j < G.dim:
        raise IndexError(f"generator index {j} out of range for dim {G.dim}")
    if G.kind == "torus":
        return np.array([[1j * label[j]]])
    if G.kind == "su2":
        return 1j * _spin_matrices(label)[j]
    k = 0
    mats = [np.eye(dim(F, x), dtype=np.complex128) for F, x in zip(G.factors, label)]
    for i, F in enumerate(G.factors):
        if j < k + F.dim:
            mats[i] = infinitesimal(F, label[i], j - k)
            break
        k += F.dim
    out = mats[0]
    for M in mats[1:]:
        out = np.kron(out, M)
    return out


def casimir_operator(G, mats):
    """-sum_j R(X_j)^2 for a list of generator matrices R(X_j)."""
    return -sum(M @ M for M in mats)


# -- evaluation ------------------------------------------------------------
def evaluate_batch(G, label, nodes):
    """pi(x_k) for a batch of elements, shape (N, d, d)."""
    if G.kind == "torus":
        x = np.asarray(nodes, dtype=np.float64).reshape(-1, G.d)
        phase = x @ np.asarray(label, dtype=np.float64)
        return np.exp(1j * phase)[:, None, None]
    if G.kind == "su2":
        g = np.asarray(nodes, dtype=np.complex128).reshape(-1, 2, 2)
        D = None
        for _, D in kernels.su2_rep_tower(g, label):
            pass
        return D
    out = None
    for F, x, sub in zip(G.factors, label, nodes):
        M = evaluate_batch(F, x, sub)
        if out is None:
            out = M
        else:
            n, a, _ = out.shape
            b = M.shape[1]
            out = np.einsum("nij,nkl->nikjl", out, M).reshape(n, a * b, a * b)
    return out


def evaluate(label_or_group, *args):
    """evaluate(G, label, g) -> pi(g) as a d x d unitary matrix."""
    G, label, g = label_or_group, args[0], args[1]
    if isinstance(g, GroupElement):
        if g.group != G:
            raise GroupMismatchError(f"{g.group} vs {G}")
        g = g.value
    nodes = _single_batch(G, g)
    return evaluate_batch(G, label, nodes)[0]


def _single_batch(G, value):
    if G.kind == "product":
        return tuple(_single_batch(F, v) for F, v in zip(G.factors, value))
    return np.asarray(value)[None]


def characters_batch(G, labels, nodes):
    """Characters tr pi(x_k) for each label: array (len(labels), N)."""
    labels = list(labels)
    if G.kind == "torus":
        x = np.asarray(nodes, dtype=np.float64).reshape(-1, G.d)
        L = np.asarray(labels, dtype=np.float64).reshape(len(labels), G.d)
        return np.exp(1j * (L @ x.T))
    if G.kind == "su2":
        g = np.asarray(nodes).reshape(-1, 2, 2)
        c = np.ascontiguousarray(np.real(g[:, 0, 0] + g[:, 1, 1]) / 2.0)
        lmax = max(labels) if labels else 0
        chi = kernels.su2_characters(c, lmax)
        return chi[np.asarray(labels, dtype=int)].astype(np.complex128)
    out = np.ones((len(labels), batch_size(G, nodes)), dtype=np.complex128)
    for i, (F, sub) in enumerate(zip(G.factors, nodes)):
        fl = sorted({p[i] for p in labels}, key=lambda p: sort_key(F, p))
        tab = characters_batch(F, fl, sub)
        pos = {p: k for k, p in enumerate(fl)}
        out *= tab[[pos[p[i]] for p in labels]]
    return out


def rep_table(rule, label):
    """Cached pi(x_k) over the nodes of a quadrature rule."""
    G = rule.group
    key = ("rep", label)
    if key in rule._cache:
        return rule._cache[key]
    if G.kind == "su2":
        tower = rule._cache.get("su2_tower", [])
        if len(tower) <= label:
            start = len(tower)
            g = np.ascontiguousarray(rule.nodes)
            D = tower[-1] if tower else None
            if D is None:
                D = np.ones((rule.size, 1, 1), dtype=np.complex128)
                tower = [D]
            for l in range(max(start, 1), label + 1):
                D = kernels.su2_step(D, g)
                tower.append(D)
            if _tower_bytes(tower) <= TABLE_CACHE_LIMIT:
                rule._cache["su2_tower"] = tower
            else:
                return tower[label]
        return tower[label]
    if G.kind == "product":
        parts = []
        for F, x, sub in zip(G.factors, label, rule.nodes):
            parts.append(evaluate_batch(F, x, sub))
        out = parts[0]
        for M in parts[1:]:
            n, a, _ = out.shape
            b = M.shape[1]
            out = np.einsum("nij,nkl->nikjl", out, M).reshape(n, a * b, a * b)
    else:
        out = evaluate_batch(G, label, rule.nodes)
    if out.nbytes * 8 < TABLE_CACHE_LIMIT:
        rule._cache[key] = out
    return out


def _tower_bytes(tower):
    return sum(t.nbytes for t in tower)
