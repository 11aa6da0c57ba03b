"""Concrete compact groups: the torus T^d, SU(2) and finite products.

Elements are wrapped in :class:`GroupElement`; batches of elements (quadrature
nodes) are kept as raw arrays in the layout below so that representation
tables can be built with vectorised kernels:

* torus ``T^d``: float array ``(N, d)`` of angles in [0, 2 pi)
* SU(2): complex array ``(N, 2, 2)``
* product: tuple of factor batches

Metric normalisation. On SU(2) the Lie algebra carries the Ad-invariant inner
product ``<X, Y> = -2 tr(XY)``, which makes ``X_j = (i/2) sigma_j`` orthonormal.
The torus uses the flat angle metric. With these choices
``|x| = 2 arccos(tr(x)/2)`` on SU(2) and the Laplacian eigenvalues are
``l(l+2)/4`` and ``|l|^2``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * np.pi

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)
SU2_BASIS = tuple(0.5j * s for s in PAULI)


class GroupMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Group:
    """Descriptor of a compact group backend.

    Build with :meth:`torus`, :meth:`su2` or :meth:`product` rather than the
    constructor.
    """

    kind: str
    d: int = 0
    factors: tuple = ()

    def __post_init__(self):
        if self.kind == "torus":
            if self.d < 1:
                raise ValueError("torus dimension must be positive")
        elif self.kind == "su2":
            pass
        elif self.kind == "product":
            if not self.factors:
                raise ValueError("product needs at least one factor")
        else:
            raise ValueError(f"unknown group kind {self.kind!r}")

    @classmethod
    def torus(cls, d=1):
        return cls("torus", int(d))

    @classmethod
    def su2(cls):
        return cls("su2")

    @classmethod
    def product(cls, *factors):
        return cls("product", 0, tuple(factors))

    @property
    def dim(self):
        if self.kind == "torus":
            return self.d
        if self.kind == "su2":
            return 3
        return sum(f.dim for f in self.factors)

    @property
    def diameter(self):
        if self.kind == "torus":
            return math.pi * math.sqrt(self.d)
        if self.kind == "su2":
            return TWO_PI
        return math.sqrt(sum(f.diameter**2 for f in self.factors))

    def __str__(self):
        if self.kind == "torus":
            return f"torus:{self.d}"
        if self.kind == "su2":
            return "su2"
        return "product:[" + ",".join(str(f) for f in self.factors) + "]"

    # -- serialisation -------------------------------------------------
    def to_json(self):
        if self.kind == "torus":
            return {"kind": "torus", "d": self.d}
        if self.kind == "su2":
            return {"kind": "su2"}
        return {"kind": "product", "factors": [f.to_json() for f in self.factors]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        kind = obj["kind"]
        if kind == "torus":
            return cls.torus(obj.get("d", 1))
        if kind == "su2":
            return cls.su2()
        if kind == "product":
            return cls.product(*(cls.from_json(f) for f in obj["factors"]))
        raise ValueError(f"unknown group kind {kind!r}")

    @classmethod
    def parse(cls, text):
        """Parse the command-line form: ``torus:2``, ``su2``, ``product:[su2,torus:1]``."""
        text = text.strip()
        if text == "su2":
            return cls.su2()
        if text.startswith("torus"):
            _, _, d = text.partition(":")
            return cls.torus(int(d) if d else 1)
        if text.startswith("product:"):
            body = text[len("product:"):].strip()
            if body.startswith("[") and body.endswith("]"):
                body = body[1:-1]
            parts, depth, cur = [], 0, ""
            for ch in body:
                if ch == "," and depth == 0:
                    parts.append(cur)
                    cur = ""
                    continue
                depth += ch == "["
                depth -= ch == "]"
                cur += ch
            parts.append(cur)
            return cls.product(*(cls.parse(p) for p in parts if p.strip()))
        raise ValueError(f"cannot parse group {text!r}")


@dataclass(frozen=True, eq=False)
class GroupElement:
    group: Group
    value: object

    def __matmul__(self, other):
        return multiply(self, other)

    def __repr__(self):
        return f"GroupElement({self.group}, {self.value!r})"


def _check_same(g, h):
    if g.group != h.group:
        raise GroupMismatchError(f"{g.group} vs {h.group}")


def _canon(G, value):
    if G.kind == "torus":
        v = np.mod(np.asarray(value, dtype=np.float64).reshape(G.d), TWO_PI)
        return np.where(v >= TWO_PI, 0.0, v)
    if G.kind == "su2":
        return np.asarray(value, dtype=np.complex128).reshape(2, 2)
    return tuple(_canon(F, v) for F, v in zip(G.factors, value))


def _validate(G, v, tol=1e-12):
    if G.kind == "su2":
        if np.max(np.abs(v.conj().T @ v - np.eye(2))) > tol or abs(np.linalg.det(v) - 1) > tol:
            raise ValueError("SU(2) element must be unitary with determinant 1")
    elif G.kind == "product":
        for F, x in zip(G.factors, v):
            _validate(F, x, tol)


def element(G, value):
    """Wrap a raw value (angles, 2x2 matrix, tuple) as an element of G."""
    v = _canon(G, value)
    _validate(G, v)
    return GroupElement(G, v)


def identity(G):
    if G.kind == "torus":
        return GroupElement(G, np.zeros(G.d))
    if G.kind == "su2":
        return GroupElement(G, np.eye(2, dtype=np.complex128))
    return GroupElement(G, tuple(identity(F).value for F in G.factors))


def _mul(G, a, b):
    if G.kind == "torus":
        return np.mod(a + b, TWO_PI)
    if G.kind == "su2":
        return a @ b
    return tuple(_mul(F, x, y) for F, x, y in zip(G.factors, a, b))


def _inv(G, a):
    if G.kind == "torus":
        return np.mod(-a, TWO_PI)
    if G.kind == "su2":
        return np.swapaxes(a, -1, -2).conj()
    return tuple(_inv(F, x) for F, x in zip(G.factors, a))


def multiply(g, h):
    _check_same(g, h)
    return GroupElement(g.group, _canon(g.group, _mul(g.group, g.value, h.value)))


def inverse(g):
    return GroupElement(g.group, _canon(g.group, _inv(g.group, g.value)))


def _dist(G, a):
    """Distance to the identity for a single value or a batch."""
    if G.kind == "torus":
        a = np.asarray(a)
        t = np.mod(a, TWO_PI)
        t = np.minimum(t, TWO_PI - t)
        return np.sqrt(np.sum(t * t, axis=-1))
    if G.kind == "su2":
        tr = np.real(np.trace(a, axis1=-2, axis2=-1))
        return 2.0 * np.arccos(np.clip(tr / 2.0, -1.0, 1.0))
    parts = [_dist(F, x) for F, x in zip(G.factors, a)]
    return np.sqrt(sum(p * p for p in parts))


def distance_to_identity(g):
    return float(_dist(g.group, g.value))


def exp_map(G, coeffs):
    """exp of sum_j c_j X_j in the fixed orthonormal Lie-algebra basis."""
    c = np.asarray(coeffs, dtype=np.float64).ravel()
    if c.size != G.dim:
        raise ValueError(f"expected {G.dim} coefficients, got {c.size}")
    return GroupElement(G, _exp(G, c))


def _exp(G, c):
    if G.kind == "torus":
        return _canon(G, c)
    if G.kind == "su2":
        r = float(np.linalg.norm(c))
        out = math.cos(r / 2) * np.eye(2, dtype=np.complex128)
        if r > 0:
            n = c / r
            out = out + 1j * math.sin(r / 2) * sum(nj * s for nj, s in zip(n, PAULI))
        return out
    parts, k = [], 0
    for F in G.factors:
        parts.append(_exp(F, c[k:k + F.dim]))
        k += F.dim
    return tuple(parts)


@dataclass(frozen=True)
class LieGenerator:
    index: int
    factor_path: tuple
    local_index: int
    matrix: np.ndarray | None = field(default=None, compare=False)


def lie_basis(G):
    """Orthonormal basis X_1..X_n of the Lie algebra (flattened over factors)."""
    out = []

    def walk(H, path):
        if H.kind == "torus":
            for j in range(H.d):
                out.append(LieGenerator(len(out), path, j))
        elif H.kind == "su2":
            for j in range(3):
                out.append(LieGenerator(len(out), path, j, SU2_BASIS[j]))
        else:
            for i, F in enumerate(H.factors):
                walk(F, path + (i,))

    walk(G, ())
    return out


def su2_inner(X, Y):
    return float(np.real(-2.0 * np.trace(X @ Y)))


# -- batches -----------------------------------------------------------
def batch_size(G, nodes):
    if G.kind == "product":
        return batch_size(G.factors[0], nodes[0])
    return np.asarray(nodes).shape[0]


def batch_take(G, nodes, idx):
    if G.kind == "product":
        return tuple(batch_take(F, x, idx) for F, x in zip(G.factors, nodes))
    return np.asarray(nodes)[idx]


def batch_from_elements(G, elements):
    vals = [e.value if isinstance(e, GroupElement) else _canon(G, e) for e in elements]
    return _stack(G, vals)


def _stack(G, vals):
    if G.kind == "product":
        return tuple(_stack(F, [v[i] for v in vals]) for i, F in enumerate(G.factors))
    return np.stack(vals)


def batch_inverse(G, nodes):
    return _inv(G, nodes)


def batch_multiply(G, a, b):
    """Elementwise product of two batches (or a batch with a single value)."""
    if G.kind == "product":
        return tuple(batch_multiply(F, x, y) for F, x, y in zip(G.factors, a, b))
    if G.kind == "torus":
        return np.mod(np.asarray(a) + np.asarray(b), TWO_PI)
    return np.matmul(a, b)


def batch_distance(G, nodes):
    return _dist(G, nodes)


def random_elements(G, n, rng):
    """Haar-distributed random batch."""
    if G.kind == "torus":
        return rng.uniform(0.0, TWO_PI, size=(n, G.d))
    if G.kind == "su2":
        q = rng.normal(size=(n, 4))
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        a = q[:, 0] + 1j * q[:, 1]
        b = q[:, 2] + 1j * q[:, 3]
        out = np.empty((n, 2, 2), dtype=np.complex128)
        out[:, 0, 0] = a
        out[:, 0, 1] = -b.conj()
        out[:, 1, 0] = b
        out[:, 1, 1] = a.conj()
        return out
    return tuple(random_elements(F, n, rng) for F in G.factors)


def random_element(G, rng):
    return GroupElement(G, _canon(G, batch_take(G, random_elements(G, 1, rng), 0)))


# -- quadrature ----------------------------------------------------------
@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Haar quadrature on G.

    ``exact_degree`` is the largest label (SU(2): l, torus: max |l_j|) whose
    matrix coefficients are integrated exactly; with the default oversampling
    it is ``4 * exactness_band``, so products of two coefficients with labels
    up to ``2 * exactness_band`` are exact.
    """

    group: Group
    nodes: object
    weights: np.ndarray
    exactness_band: object
    exact_degree: object
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def size(self):
        return self.weights.shape[0]

    def node(self, k):
        return GroupElement(self.group, _canon(self.group, batch_take(self.group, self.nodes, k)))

    def integrate(self, values):
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))

    @cached_property
    def distances(self):
        return batch_distance(self.group, self.nodes)


def _torus_rule(d, degree):
    m = degree + 1
    grid = np.arange(m) * (TWO_PI / m)
    mesh = np.meshgrid(*([grid] * d), indexing="ij")
    nodes = np.stack([g.ravel() for g in mesh], axis=-1)
    weights = np.full(nodes.shape[0], 1.0 / nodes.shape[0])
    return nodes, weights


def su2_euler(alpha, beta, gamma):
    """exp(alpha X3) exp(beta X2) exp(gamma X3), broadcasting over inputs."""
    alpha, beta, gamma = np.broadcast_arrays(alpha, beta, gamma)
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    ep = np.exp(0.5j * (alpha + gamma))
    em = np.exp(0.5j * (alpha - gamma))
    out = np.empty(alpha.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = ep * c
    out[..., 0, 1] = em * s
    out[..., 1, 0] = -em.conj() * s
    out[..., 1, 1] = ep.conj() * c
    return out


def _su2_rule(degree):
    # alpha in [0, 2pi), gamma in [0, 4pi) (even count), Gauss-Legendre in cos(beta)
    j = degree // 2
    n_alpha = j + 1
    n_gamma = degree + 1 + (degree + 1) % 2
    n_beta = j // 2 + 1
    x, wx = np.polynomial.legendre.leggauss(n_beta)
    alpha = np.arange(n_alpha) * (TWO_PI / n_alpha)
    gamma = np.arange(n_gamma) * (2 * TWO_PI / n_gamma)
    beta = np.arccos(x)
    A, B, C = np.meshgrid(alpha, beta, gamma, indexing="ij")
    W = np.broadcast_to((wx / 2.0)[None, :, None], A.shape) / (n_alpha * n_gamma)
    return su2_euler(A.ravel(), B.ravel(), C.ravel()), W.ravel().copy()


def _rule_arrays(G, degree):
    if G.kind == "torus":
        return _torus_rule(G.d, int(degree))
    if G.kind == "su2":
        return _su2_rule(int(degree))
    degs = degree if isinstance(degree, (tuple, list)) else [degree] * len(G.factors)
    parts = [_rule_arrays(F, dg) for F, dg in zip(G.factors, degs)]
    sizes = [p[1].shape[0] for p in parts]
    idx = np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij")
    idx = [i.ravel() for i in idx]
    nodes = tuple(batch_take(F, p[0], i) for F, p, i in zip(G.factors, parts, idx))
    w = np.ones(idx[0].shape[0])
    for p, i in zip(parts, idx):
        w = w * p[1][i]
    return nodes, w


def haar_quadrature(G, band, oversample=2):
    """Quadrature exact for coefficients with labels up to ``2 * oversample * band``.

    ``band`` may be a list (one entry per factor) for product groups.
    """
    if isinstance(band, (list, tuple)):
        if G.kind != "product" or len(band) != len(G.factors):
            raise ValueError("per-factor bands need a product group")
        if min(band) < 0:
            raise ValueError("band must be nonnegative")
        degree = tuple(2 * oversample * int(b) for b in band)
    else:
        if band < 0:
            raise ValueError("band must be nonnegative")
        degree = 2 * oversample * int(band)
    nodes, weights = _rule_arrays(G, degree)
    return QuadratureRule(G, nodes, weights, band, degree)


def quadrature_for_degree(G, degree):
    """Smallest default rule exact up to the given label degree (per factor for products)."""
    if isinstance(degree, (list, tuple)):
        band = [max(0, math.ceil(dg / 4)) for dg in degree]
    else:
        band = max(0, math.ceil(degree / 4))
    return haar_quadrature(G, band)
