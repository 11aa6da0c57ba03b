"""Matrix-valued fields over a truncated dual.

A field stores one matrix per label of its ``domain`` (a finite set of labels,
by default the band ``{lambda_pi <= band}``). Missing entries are zero.
:class:`Symbol` fields have one matrix of size ``d_pi``; :class:`HigherField`
carries a ``word`` of fundamental labels ``(phi_1, ..., phi_k)`` and matrices
acting on ``H_phi_1 (x) ... (x) H_phi_k (x) H_pi`` in that factor order.

The ``margin`` ``m`` records that the field vanishes outside the labels whose
``m``-step fundamental neighbourhood stays inside the domain, so that reading
the field as zero beyond the domain is exact for ``m`` difference steps.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import reps
from .groups import Group, GroupMismatchError


class MarginError(ValueError):
    """Raised when an operation needs more frequency headroom than a field has."""


class BandMismatchError(ValueError):
    pass


@lru_cache(maxsize=256)
def interior(G, domain, steps=1):
    """Labels of ``domain`` whose ``steps``-step neighbourhood lies in ``domain``."""
    cur = frozenset(domain)
    for _ in range(steps):
        cur = frozenset(p for p in cur if reps.neighbors(G, p) <= cur)
    return tuple(p for p in domain if p in cur)


def interior_levels(G, domain, max_steps=64):
    """List ``[I_0, I_1, ...]`` of nested interiors (frozensets) until empty or ``max_steps``."""
    levels = [frozenset(domain)]
    while levels[-1] and len(levels) <= max_steps:
        prev = levels[-1]
        levels.append(frozenset(p for p in prev if reps.neighbors(G, p) <= prev))
    return levels


def support_margin(G, domain, support, max_steps=64):
    """Largest m with ``support`` inside the m-th interior of ``domain``."""
    support = frozenset(support)
    if not support:
        return max_steps
    m = 0
    for k, lev in enumerate(interior_levels(G, domain, max_steps)):
        if support <= lev:
            m = k
        else:
            break
    return m


def word_dim(G, word):
    return math.prod(reps.dim(G, p) for p in word)


class Field:
    """Common implementation; use :class:`Symbol` or :class:`HigherField`."""

    __slots__ = ("group", "band", "domain", "entries", "word", "margin")

    def __init__(self, group, band, entries=None, *, word=(), domain=None, margin=None, check=True):
        if not isinstance(group, Group):
            raise TypeError("group must be a Group")
        self.group = group
        self.band = float(band)
        self.word = tuple(word)
        self.domain = tuple(domain) if domain is not None else reps.enumerate_band(group, self.band)
        dset = set(self.domain)
        W = word_dim(group, self.word)
        clean = {}
        for lab, M in (entries or {}).items():
            lab = reps.canonical_label(group, lab)
            if lab not in dset:
                raise BandMismatchError(f"label {lab} is outside the field domain")
            M = np.asarray(M, dtype=np.complex128)
            n = W * reps.dim(group, lab)
            if check and M.shape != (n, n):
                raise ValueError(f"entry at {lab} has shape {M.shape}, expected {(n, n)}")
            clean[lab] = M
        self.entries = clean
        if margin is None:
            support = [p for p, M in clean.items() if np.any(M != 0)]
            margin = support_margin(group, self.domain, support)
        self.margin = int(margin)

    # -- access ----------------------------------------------------------
    def size(self, label):
        return word_dim(self.group, self.word) * reps.dim(self.group, label)

    def __getitem__(self, label):
        return self.entry(label)

    def entry(self, label):
        M = self.entries.get(label)
        if M is None:
            n = self.size(label)
            return np.zeros((n, n), dtype=np.complex128)
        return M

    def __contains__(self, label):
        return label in self.entries

    def labels(self):
        return self.domain

    def items(self):
        for p in self.domain:
            yield p, self.entry(p)

    @property
    def word_dim(self):
        return word_dim(self.group, self.word)

    def with_margin(self, margin):
        return self._like(self.entries, margin=margin)

    def _like(self, entries, **kw):
        kw.setdefault("word", self.word)
        kw.setdefault("domain", self.domain)
        cls = Symbol if not kw["word"] else HigherField
        return cls(self.group, self.band, entries, check=False, **kw)

    # -- algebra ----------------------------------------------------------
    def _check_compatible(self, other):
        if self.group != other.group:
            raise GroupMismatchError(f"{self.group} vs {other.group}")
        if self.word != other.word:
            raise ValueError("fields act on different tensor words")

    def _common_domain(self, other):
        if self.domain == other.domain:
            return self.domain
        odom = set(other.domain)
        return tuple(p for p in self.domain if p in odom)

    def __add__(self, other):
        if np.isscalar(other):
            return self + other * identity_like(self)
        self._check_compatible(other)
        dom = self._common_domain(other)
        margin = min(self.margin, other.margin) if dom == self.domain else None
        return self._like({p: self.entry(p) + other.entry(p) for p in dom}, domain=dom, margin=margin)

    __radd__ = __add__

    def __neg__(self):
        return self._like({p: -M for p, M in self.entries.items()}, margin=self.margin)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return self._like({p: other * M for p, M in self.entries.items()},
                              margin=self.margin if other != 0 else None)
        self._check_compatible(other)
        dom = self._common_domain(other)
        ent = {}
        for p in dom:
            if p in self.entries and p in other.entries:
                ent[p] = self.entries[p] @ other.entries[p]
        margin = max(self.margin, other.margin) if dom == self.domain else None
        return self._like(ent, domain=dom, margin=margin)

    def __rmul__(self, other):
        if np.isscalar(other):
            return self * other
        return NotImplemented

    def __matmul__(self, other):
        return self * other

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = identity_like(self)
        for _ in range(k):
            out = out * self
        return out

    def adjoint(self):
        return self._like({p: M.conj().T for p, M in self.entries.items()}, margin=self.margin)

    def map(self, fn, margin=None):
        """Apply ``fn(label, matrix)`` entrywise (over the whole domain)."""
        return self._like({p: fn(p, self.entry(p)) for p in self.domain}, margin=margin)

    def restrict(self, domain):
        domain = tuple(domain)
        dset = set(domain)
        return self._like({p: M for p, M in self.entries.items() if p in dset}, domain=domain, margin=None)

    def max_abs(self):
        return max((float(np.abs(M).max()) for M in self.entries.values() if M.size), default=0.0)

    def __repr__(self):
        kind = type(self).__name__
        return (f"{kind}({self.group}, band={self.band:g}, labels={len(self.domain)}, "
                f"word={self.word}, margin={self.margin})")


class Symbol(Field):
    """A field of ``d_pi x d_pi`` matrices (also used for Fourier coefficients)."""

    __slots__ = ()

    def __init__(self, group, band, entries=None, *, domain=None, margin=None, check=True, word=()):
        if word:
            raise ValueError("Symbol has an empty word; use HigherField")
        super().__init__(group, band, entries, domain=domain, margin=margin, check=check)


class HigherField(Field):
    """Image of a symbol under difference operators."""

    __slots__ = ()


# Fourier coefficients of a function are stored as a symbol.
CoefficientField = Symbol


def identity_like(field):
    ent = {p: np.eye(field.size(p), dtype=np.complex128) for p in field.domain}
    return field._like(ent, margin=None)


def max_difference(a, b):
    """Largest entrywise operator-norm difference over the common domain."""
    dom = a._common_domain(b)
    return max((float(np.linalg.norm(a.entry(p) - b.entry(p), 2)) for p in dom), default=0.0)


# -- serialisation --------------------------------------------------------
def field_to_json(field):
    G = field.group
    obj = {
        "group": G.to_json(),
        "band": field.band,
        "margin": field.margin,
        "entries": [
            {"label": reps.label_to_json(G, p), "re": M.real.tolist(), "im": M.imag.tolist()}
            for p, M in ((p, field.entries[p]) for p in field.domain if p in field.entries)
        ],
    }
    if field.word:
        obj["word"] = [reps.label_to_json(G, p) for p in field.word]
    if field.domain != reps.enumerate_band(G, field.band):
        obj["domain"] = [reps.label_to_json(G, p) for p in field.domain]
    return obj


def field_from_json(obj):
    try:
        G = Group.from_json(obj["group"])
        band = float(obj["band"])
        word = tuple(reps.label_from_json(G, w) for w in obj.get("word", []))
        domain = None
        if "domain" in obj:
            domain = tuple(reps.label_from_json(G, p) for p in obj["domain"])
        entries = {}
        for e in obj["entries"]:
            lab = reps.label_from_json(G, e["label"])
            entries[lab] = np.asarray(e["re"], dtype=float) + 1j * np.asarray(e.get("im", 0.0), dtype=float)
            if entries[lab].ndim == 0:
                entries[lab] = entries[lab].reshape(1, 1)
        margin = obj.get("margin")
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed field JSON: {exc}") from exc
    cls = HigherField if word else Symbol
    return cls(G, band, entries, word=word, domain=domain, margin=margin)
