"""The target space X: coordinate norms, a basis with partial-sum projections,
and finite covers standing in for compact sets."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels

_NORM_NAMES = {"l1": 1.0, "l2": 2.0, "linf": math.inf, "inf": math.inf}


def _parse_q(norm):
    if isinstance(norm, str):
        try:
            return _NORM_NAMES[norm.lower()]
        except KeyError:
            raise ValueError(f"unknown norm {norm!r}") from None
    q = float(norm)
    if not q >= 1.0:
        raise ValueError(f"l_q norm needs q >= 1, got {q}")
    return q


class NormBracket(NamedTuple):
    lower: float
    upper: float
    exact: bool


class AmbientSpace:
    """R^d with an l_q norm and a basis given by the columns of ``basis``.

    ``basis=None`` means the canonical basis.
    """

    def __init__(self, dim, norm=2.0, basis=None):
        dim = int(dim)
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self.q = _parse_q(norm)
        if basis is None:
            self._basis = None
            self._inverse = None
        else:
            B = np.array(basis, dtype=np.float64)
            if B.shape != (dim, dim):
                raise ValueError(f"basis must be {dim}x{dim}, got {B.shape}")
            cond = np.linalg.cond(B)
            if not np.isfinite(cond) or cond > 1e12:
                raise ValueError(f"basis table is singular or ill-conditioned (cond={cond:.3g})")
            B.setflags(write=False)
            self._basis = B
            inv = np.linalg.inv(B)
            inv.setflags(write=False)
            self._inverse = inv

    @property
    def canonical(self):
        return self._basis is None

    @property
    def basis(self):
        return np.eye(self.dim) if self._basis is None else self._basis

    @property
    def norm_name(self):
        if math.isinf(self.q):
            return "linf"
        if self.q in (1.0, 2.0):
            return f"l{int(self.q)}"
        return f"l{self.q:g}"

    def __repr__(self):
        b = "canonical" if self.canonical else "custom"
        return f"AmbientSpace(dim={self.dim}, norm={self.norm_name}, basis={b})"

    def __eq__(self, other):
        if not isinstance(other, AmbientSpace):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.q == other.q
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self):
        return hash((self.dim, self.q, self.basis.tobytes()))

    def norms(self, x):
        """Norms of vectors stacked along the last axis."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected vectors of dimension {self.dim}, got {x.shape[-1]}")
        flat = x.reshape(-1, self.dim)
        return kernels.vector_norms(flat, self.q).reshape(x.shape[:-1])

    def coordinates(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self._inverse is None:
            return x.copy()
        return x @ self._inverse.T

    def from_coordinates(self, c):
        c = np.asarray(c, dtype=np.float64)
        if self._basis is None:
            return c.copy()
        return c @ self._basis.T

    def _check_N(self, N):
        if isinstance(N, bool) or int(N) != N or not 1 <= N <= self.dim:
            raise ValueError(f"projection index N={N} outside 1..{self.dim}")
        return int(N)

    def project(self, x, N):
        """Apply P_N to vectors stacked along the last axis."""
        N = self._check_N(N)
        c = self.coordinates(x)
        if N == self.dim:
            return np.array(x, dtype=np.float64)
        c[..., N:] = 0.0
        return self.from_coordinates(c)

    def projection_matrix(self, N):
        N = self._check_N(N)
        if self._basis is None:
            P = np.zeros((self.dim, self.dim))
            P[:N, :N] = np.eye(N)
            return P
        return self._basis[:, :N] @ self._inverse[:N, :]

    @cached_property
    def _orthonormal(self):
        if self._basis is None:
            return True
        B = self._basis
        return bool(np.allclose(B.T @ B, np.eye(self.dim), rtol=0, atol=1e-13))

    def projection_norm_bracket(self, N):
        """Operator norm of P_N as a bracket ``lower <= ||P_N|| <= upper``."""
        N = self._check_N(N)
        if N == self.dim or self._basis is None:
            return NormBracket(1.0, 1.0, True)
        P = self.projection_matrix(N)
        absP = np.abs(P)
        n1 = float(absP.sum(axis=0).max())
        ninf = float(absP.sum(axis=1).max())
        if self.q == 1.0:
            return NormBracket(n1, n1, True)
        if math.isinf(self.q):
            return NormBracket(ninf, ninf, True)
        if self.q == 2.0:
            if self._orthonormal:
                return NormBracket(1.0, 1.0, True)
            return _spectral_bracket(P, math.sqrt(n1 * ninf))
        # Riesz-Thorin interpolation between the exact l1 and linf norms
        upper = n1 ** (1.0 / self.q) * ninf ** (1.0 - 1.0 / self.q)
        probes = np.vstack([np.eye(self.dim), np.sign(P)])
        img = kernels.vector_norms(probes @ P.T, self.q)
        src = kernels.vector_norms(probes, self.q)
        ok = src > 0
        lower = float(np.max(img[ok] / src[ok]))
        return NormBracket(lower, max(upper, lower), False)

    def projection_operator_norm(self, N):
        """Certified upper value of ||P_N|| (exact where the bracket is exact)."""
        return self.projection_norm_bracket(N).upper

    @cached_property
    def basis_constant(self):
        return max(self.projection_operator_norm(N) for N in range(1, self.dim + 1))

    def to_dict(self):
        d = {"dim": self.dim, "norm": self.norm_name if self.q in (1.0, 2.0, math.inf) else self.q}
        if self._basis is not None:
            d["basis"] = self._basis.T.tolist()
        return d

    @classmethod
    def from_dict(cls, d):
        basis = d.get("basis")
        if basis is not None:
            basis = np.asarray(basis, dtype=np.float64).T
        return cls(d["dim"], d.get("norm", 2.0), basis)


def _spectral_bracket(P, cap, iterations=200, squarings=8):
    A = P.T @ P
    # lower: Rayleigh quotient after power iteration (every iterate is a valid lower bound)
    v = np.ones(A.shape[0]) + np.arange(A.shape[0]) * 1e-3
    lam_lo = 0.0
    for _ in range(iterations):
        w = A @ v
        nv = np.linalg.norm(w)
        if nv == 0:
            break
        v = w / nv
        lam_lo = max(lam_lo, float(v @ A @ v))
    # upper: ||A||_2 <= ||A^(2^k)||_F^(1/2^k)
    s = np.linalg.norm(A)
    lam_hi = s
    M = A / s
    logscale = math.log(s)
    for k in range(1, squarings + 1):
        M = M @ M
        t = np.linalg.norm(M)
        if t == 0:
            break
        logscale = 2.0 * logscale + math.log(t)
        M = M / t
        lam_hi = min(lam_hi, math.exp(logscale / 2.0 ** k))
    upper = min(math.sqrt(lam_hi) * (1 + 1e-12), cap)
    lower = math.sqrt(lam_lo)
    return NormBracket(lower, max(upper, lower), False)


def partial_sum_projection(space, x, N):
    return space.project(x, N)


def projection_operator_norm(space, N):
    return space.projection_operator_norm(N)


@dataclass(frozen=True, eq=False)
class CompactCover:
    """Closed balls of a common radius around finitely many centers.

    A point belongs to the cover when its distance to the nearest center is
    at most ``radius``.  With ``radius == 0`` the cover is just the finite
    set of centers.
    """

    space: AmbientSpace
    centers: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.array(self.centers, dtype=np.float64)
        if c.size == 0:
            c = c.reshape(0, self.space.dim)
        if c.ndim == 1:
            c = c.reshape(1, -1)
        if c.ndim != 2 or c.shape[1] != self.space.dim:
            raise ValueError(f"centers must be an (M, {self.space.dim}) table")
        r = float(self.radius)
        if not r >= 0 or not math.isfinite(r):
            raise ValueError("cover radius must be finite and nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radius", r)

    def __len__(self):
        return self.centers.shape[0]

    def distance(self, x):
        """Distance from each vector (last axis) to the nearest center."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.space.dim:
            raise ValueError(
                f"dimension mismatch: vectors of size {x.shape[-1]}, space of dim {self.space.dim}"
            )
        if len(self) == 0:
            raise ValueError("distance to an empty center set is undefined")
        flat = x.reshape(-1, self.space.dim)
        _, dist = kernels.first_min_assign(flat, self.centers, self.space.q)
        return dist.reshape(x.shape[:-1])

    def contains(self, x):
        x = np.asarray(x, dtype=np.float64)
        if len(self) == 0:
            return np.zeros(x.shape[:-1], dtype=bool)
        return self.distance(x) <= self.radius

    def to_dict(self):
        return {"centers": self.centers.tolist(), "radius": self.radius}

    @classmethod
    def from_dict(cls, space, d):
        return cls(space, np.asarray(d["centers"], dtype=np.float64).reshape(-1, space.dim), d["radius"])


def cover_distance(x, cover):
    return cover.distance(x)


def greedy_net_indices(space, points, eps):
    """Farthest-point greedy eps-net seeded at the first point."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, space.dim)
    if pts.shape[0] == 0:
        raise ValueError("greedy_net needs at least one point")
    if not eps > 0:
        raise ValueError("eps must be positive")
    return kernels.farthest_first_points(pts, space.q, float(eps))


def greedy_net(space, points, eps):
    """An eps-net of ``points`` drawn from the points themselves.

    Every input point is within ``eps`` of a center and distinct centers are
    more than ``eps`` apart.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, space.dim)
    idx = greedy_net_indices(space, pts, eps)
    return CompactCover(space, pts[idx], eps)


def enlarge_cover(cover, delta):
    if not delta > 0:
        raise ValueError("enlargement must be positive")
    return CompactCover(cover.space, cover.centers, cover.radius + delta)


class IntersectionHandle:
    """Membership in the intersection of several covers.

    :meth:`over_approximation` returns a single cover containing the whole
    intersection: the centers of the tightest cover that can still be within
    its radius of a common point.
    """

    def __init__(self, covers: Sequence[CompactCover]):
        covers = list(covers)
        if not covers:
            raise ValueError("cannot intersect an empty sequence of covers")
        space = covers[0].space
        for c in covers[1:]:
            if c.space != space:
                raise ValueError("covers live in different ambient spaces")
        self.covers = covers
        self.space = space

    def contains(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.ones(x.shape[:-1], dtype=bool)
        for c in self.covers:
            out &= c.contains(x)
        return out

    @cached_property
    def _smallest(self):
        return min(range(len(self.covers)), key=lambda i: (self.covers[i].radius, i))

    def over_approximation(self):
        base = self.covers[self._smallest]
        r0 = base.radius
        keep = np.ones(len(base), dtype=bool)
        if len(base):
            for i, c in enumerate(self.covers):
                if i == self._smallest:
                    continue
                if len(c) == 0:
                    keep[:] = False
                    break
                keep &= c.distance(base.centers) <= c.radius + r0
        return CompactCover(self.space, base.centers[keep], r0)


def intersect_covers(covers):
    return IntersectionHandle(covers)
