"""Vector-valued functions on a finite measure space and families of them."""
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .ambient import AmbientSpace, CompactCover
from .measure import MeasureSpace, as_norm


def _table(values, space, ambient):
    v = np.array(values, dtype=np.float64)
    if v.ndim == 1 and ambient.dim == 1:
        v = v.reshape(-1, 1)
    if v.shape != (space.atom_count, ambient.dim):
        raise ValueError(
            f"function table must be {space.atom_count}x{ambient.dim}, got {v.shape}"
        )
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class VectorFunction:
    """f: atoms -> X stored as an (atoms, dim) table."""

    space: MeasureSpace
    ambient: AmbientSpace
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _table(self.values, self.space, self.ambient))

    def pointwise_norms(self):
        return self.ambient.norms(self.values)

    def __sub__(self, other):
        _check_same(self, other)
        return VectorFunction(self.space, self.ambient, self.values - other.values)

    def __add__(self, other):
        _check_same(self, other)
        return VectorFunction(self.space, self.ambient, self.values + other.values)

    def masked(self, mask):
        """``1_mask * f`` (zero, never negative zero, off the mask)."""
        m = np.asarray(mask, dtype=bool)
        return VectorFunction(self.space, self.ambient, np.where(m[:, None], self.values, 0.0))

    def to_dict(self):
        return {"values": self.values.tolist()}


def _check_same(f, g):
    if f.space != g.space or f.ambient != g.ambient:
        raise ValueError("functions live on different spaces")


def bochner_norm(F, p):
    """L^p(mu; X) norm of a single function (``p`` may be a norm object)."""
    norm = as_norm(p)
    return float(norm.norm(F.space, F.pointwise_norms()))


class Prefix(Sequence):
    """The first members of a family, stacked into an (L, atoms, dim) array.

    ``indices`` holds the family index of every row, so sub-prefixes keep
    reporting original indices.
    """

    def __init__(self, space, ambient, values, indices=None):
        v = np.array(values, dtype=np.float64)
        if v.ndim != 3 or v.shape[1:] != (space.atom_count, ambient.dim):
            raise ValueError(
                f"prefix must be (L, {space.atom_count}, {ambient.dim}), got {v.shape}"
            )
        v.setflags(write=False)
        self.space = space
        self.ambient = ambient
        self.values = v
        if indices is None:
            indices = np.arange(v.shape[0])
        idx = np.asarray(indices, dtype=np.int64)
        if idx.shape != (v.shape[0],):
            raise ValueError("one index per member is required")
        idx.setflags(write=False)
        self.indices = idx

    @classmethod
    def from_functions(cls, functions):
        functions = list(functions)
        if not functions:
            raise ValueError("empty prefix")
        f0 = functions[0]
        for f in functions[1:]:
            _check_same(f0, f)
        return cls(f0.space, f0.ambient, np.stack([f.values for f in functions]))

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return self.take(np.arange(len(self))[i])
        return VectorFunction(self.space, self.ambient, self.values[i])

    def take(self, positions):
        pos = np.asarray(positions, dtype=np.int64)
        return Prefix(self.space, self.ambient, self.values[pos], self.indices[pos])

    def positions_of(self, indices):
        lookup = {int(k): i for i, k in enumerate(self.indices)}
        return np.array([lookup[int(k)] for k in indices], dtype=np.int64)

    def with_values(self, values):
        return Prefix(self.space, self.ambient, values, self.indices)

    @cached_property
    def pointwise_norms(self):
        """(L, atoms) table of ||f_n(omega)||."""
        n = self.ambient.norms(self.values)
        n.setflags(write=False)
        return n

    def pooled_values(self):
        return self.values.reshape(-1, self.ambient.dim)


def as_prefix(obj):
    if isinstance(obj, Prefix):
        return obj
    if isinstance(obj, VectorFunction):
        return Prefix.from_functions([obj])
    return Prefix.from_functions(obj)


class FunctionFamily:
    """A deterministic index -> function generator with an append-only cache.

    ``generator(i)`` must return the (atoms, dim) table of member ``i`` and
    must always return the same table for the same index.  Indices start
    at 0.
    """

    def __init__(self, space, ambient, generator: Callable[[int], np.ndarray], name="custom",
                 params=None, size=None):
        self.space = space
        self.ambient = ambient
        self.generator = generator
        self.name = name
        self.params = dict(params or {})
        self.size = size
        self._cache: list[np.ndarray] = []
        self._lock = threading.Lock()

    def __repr__(self):
        return f"FunctionFamily({self.name!r}, cached={len(self._cache)})"

    def _materialize(self, L):
        if self.size is not None and L > self.size:
            raise IndexError(f"family {self.name!r} has only {self.size} members")
        with self._lock:
            for i in range(len(self._cache), L):
                self._cache.append(_table(self.generator(i), self.space, self.ambient))

    def member(self, i):
        self._materialize(i + 1)
        return VectorFunction(self.space, self.ambient, self._cache[i])

    def prefix(self, L):
        L = int(L)
        if L < 1:
            raise ValueError("prefix length must be at least 1")
        self._materialize(L)
        return Prefix(self.space, self.ambient, np.stack(self._cache[:L]))

    def describe(self):
        return {"name": self.name, "params": self.params}


@dataclass(frozen=True)
class FamilyDecomposition:
    """Indicator-restricted pieces of one function for a radius and a cover.

    ``joint`` maps ``(radius_side, cover_side)`` with sides ``"le"/"gt"`` and
    ``"in"/"out"`` to the piece on that intersection.
    """

    inside_radius: VectorFunction
    outside_radius: VectorFunction
    inside_cover: VectorFunction
    outside_cover: VectorFunction
    joint: dict
    radius_mask: np.ndarray
    cover_mask: np.ndarray


def decompose(F, r, K):
    """Split ``F`` by ``{||F|| <= r}`` and by ``{F in K}``."""
    if not r > 0:
        raise ValueError("radius must be positive")
    le = F.pointwise_norms() <= r
    inside = K.contains(F.values)
    joint = {
        ("le", "in"): F.masked(le & inside),
        ("le", "out"): F.masked(le & ~inside),
        ("gt", "in"): F.masked(~le & inside),
        ("gt", "out"): F.masked(~le & ~inside),
    }
    return FamilyDecomposition(
        inside_radius=F.masked(le),
        outside_radius=F.masked(~le),
        inside_cover=F.masked(inside),
        outside_cover=F.masked(~inside),
        joint=joint,
        radius_mask=le,
        cover_mask=inside,
    )


def pairwise_distances(prefix, p):
    """(L, L) table of ||f_i - f_j|| in L^p(mu; X) (or the given norm)."""
    prefix = as_prefix(prefix)
    return as_norm(p).pairwise(prefix.space, prefix.values, prefix.ambient.q)


@dataclass(frozen=True)
class Traversal:
    """Farthest-first traversal of a prefix; nets at every scale at once."""

    order: np.ndarray
    radii: np.ndarray
    indices: np.ndarray

    def net_positions(self, eps):
        if not eps > 0:
            raise ValueError("eps must be positive")
        k = 1 + int(np.count_nonzero(self.radii[1:] > eps))
        return self.order[:k]

    def net(self, eps):
        return self.indices[self.net_positions(eps)]

    def covering_number(self, eps):
        return len(self.net_positions(eps))


def traversal(prefix, p, distances=None):
    prefix = as_prefix(prefix)
    if len(prefix) == 0:
        raise ValueError("empty prefix")
    D = pairwise_distances(prefix, p) if distances is None else distances
    order, radii = kernels.farthest_first(D)
    return Traversal(order, radii, prefix.indices)


def family_greedy_net(prefix, p, eps):
    """Family indices of a greedy eps-net of the prefix in the Bochner norm."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return traversal(prefix, p).net(eps)


def covering_number(prefix, p, eps):
    if not eps > 0:
        raise ValueError("eps must be positive")
    return traversal(prefix, p).covering_number(eps)


def restrict_to_cover(prefix, cover):
    """The prefix with every member replaced by ``1_{f in K} f``."""
    prefix = as_prefix(prefix)
    inside = cover.contains(prefix.values)
    return prefix.with_values(np.where(inside[..., None], prefix.values, 0.0))


def cover_masks(prefix, cover):
    """(L, atoms) booleans: does ``f_n(omega)`` lie in the cover."""
    prefix = as_prefix(prefix)
    if cover.space.dim != prefix.ambient.dim:
        raise ValueError("cover and prefix have different dimensions")
    return cover.contains(prefix.values)


def constant_cover(space: AmbientSpace, values, radius=0.0):
    return CompactCover(space, np.unique(np.asarray(values).reshape(-1, space.dim), axis=0), radius)
