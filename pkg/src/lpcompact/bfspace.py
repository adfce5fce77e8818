"""Discrete Banach function spaces E over a finite measure space.

A :class:`DiscreteBFS` can be passed anywhere the family algorithms accept
an exponent ``p``; with ``kind="lq"`` it reproduces the L^q results exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .ambient import CompactCover
from .bochner import as_prefix
from .errors import GridExhausted, NoWitnessFound
from .measure import MeasureSpace, ScalarSample, subset_measure, weighted_lp

EXHAUSTIVE_ATOM_LIMIT = 24


class YoungFunction:
    """Convex nondecreasing Phi with Phi(0) = 0 and Phi(t) > 0 for t > 0."""

    def __call__(self, t):
        raise NotImplementedError

    def inverse(self, y):
        """Smallest t with Phi(t) >= y, by bisection unless overridden."""
        lo, hi = 0.0, 1.0
        while self(hi) < y:
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self(mid) < y:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
        return hi


class PowerPhi(YoungFunction):
    def __init__(self, a):
        a = float(a)
        if not a >= 1.0:
            raise ValueError("power Young function needs exponent a >= 1")
        self.a = a

    def __call__(self, t):
        return np.asarray(t, dtype=np.float64) ** self.a

    def inverse(self, y):
        return float(y) ** (1.0 / self.a)

    def to_dict(self):
        return {"phi": "power", "a": self.a}


class ExpPhi(YoungFunction):
    """``exp(t) - 1`` continued linearly past ``cap`` so it never overflows."""

    def __init__(self, cap=50.0):
        self.cap = float(cap)
        self._ec = math.expm1(self.cap)
        self._slope = math.exp(self.cap)

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        lin = self._ec + self._slope * (t - self.cap)
        return np.where(t <= self.cap, np.expm1(np.minimum(t, self.cap)), lin)

    def inverse(self, y):
        y = float(y)
        if y <= self._ec:
            return math.log1p(y)
        return self.cap + (y - self._ec) / self._slope

    def to_dict(self):
        return {"phi": "exp", "cap": self.cap}


class TablePhi(YoungFunction):
    """Piecewise-linear Phi through ``(t_i, y_i)``, extended with the last slope."""

    def __init__(self, t, y):
        t = np.asarray(t, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if t.ndim != 1 or t.shape != y.shape or t.size < 2:
            raise ValueError("table needs matching 1-d arrays of at least two knots")
        if t[0] != 0.0 or y[0] != 0.0:
            raise ValueError("table must start at Phi(0) = 0")
        if np.any(np.diff(t) <= 0):
            raise ValueError("knots must be strictly increasing")
        slopes = np.diff(y) / np.diff(t)
        if np.any(slopes <= 0):
            raise ValueError("Phi must be strictly increasing (positive off zero)")
        if np.any(np.diff(slopes) < -1e-12 * np.abs(slopes[1:])):
            raise ValueError("Phi fails the convexity check (slopes decrease)")
        self.t, self.y, self._slopes = t, y, slopes

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        inner = np.interp(t, self.t, self.y)
        tail = self.y[-1] + self._slopes[-1] * (t - self.t[-1])
        return np.where(t <= self.t[-1], inner, tail)

    def to_dict(self):
        return {"phi": "table", "t": self.t.tolist(), "y": self.y.tolist()}


def young_from_dict(d):
    """Inverse of ``YoungFunction.to_dict``."""
    kind = d.get("phi")
    if kind == "power":
        return PowerPhi(d["a"])
    if kind == "exp":
        return ExpPhi(d.get("cap", 50.0))
    if kind == "table":
        return TablePhi(d["t"], d["y"])
    raise ValueError(f"unknown Young function {kind!r}")


def _luxemburg_rows(a, w, phi, rtol=1e-12):
    """Luxemburg norms of the rows of a nonnegative (k, A) table."""
    a = np.asarray(a, dtype=np.float64)
    k = a.shape[0]
    out = np.zeros(k)
    m = a.max(axis=1) if a.shape[1] else np.zeros(k)
    nz = np.nonzero(m > 0)[0]
    if nz.size == 0:
        return out
    s = a[nz] / m[nz, None]  # scaled rows, max entry 1

    def modular(lam):
        return np.sum(w * phi(s / lam[:, None]), axis=1)

    # bracket the root per row by doubling and halving, then bisect
    hi = np.ones(nz.size)
    while True:
        bad = modular(hi) > 1.0
        if not bad.any():
            break
        hi = np.where(bad, hi * 2.0, hi)
    lo = hi.copy()
    while True:
        good = modular(lo) <= 1.0
        if not good.any():
            break
        lo = np.where(good, lo * 0.5, lo)
    for _ in range(200):
        if np.all(hi - lo <= rtol * hi):
            break
        mid = 0.5 * (lo + hi)
        ok = modular(mid) <= 1.0
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    out[nz] = m[nz] * hi
    return out


class DiscreteBFS:
    """A lattice norm on scalar functions over a finite measure space.

    ``kind="lq"`` gives the weighted L^q norm; ``kind="luxemburg"`` the
    Luxemburg norm of a Young function ``phi``.  Order continuity holds
    automatically in finite dimension and is recorded in ``assumptions``.
    """

    assumptions = ("order_continuous",)

    def __init__(self, space: MeasureSpace, kind="lq", q=1.0, phi=None):
        self.space = space
        self.kind = kind
        if kind == "lq":
            q = float(q)
            if not (q >= 1.0 and math.isfinite(q)):
                raise ValueError(f"weighted-Lq needs 1 <= q < inf, got {q}")
            self.q = q
            self.phi = None
        elif kind == "luxemburg":
            if phi is None:
                raise ValueError("Luxemburg norm needs a Young function")
            if not isinstance(phi, YoungFunction):
                raise TypeError("phi must be a YoungFunction")
            self._check_phi(phi)
            self.q = None
            self.phi = phi
        else:
            raise ValueError(f"unknown Banach function space kind {kind!r}")

    @staticmethod
    def _check_phi(phi):
        t = np.linspace(0.0, 8.0, 257)
        y = np.asarray(phi(t), dtype=np.float64)
        if y[0] != 0.0:
            raise ValueError("Phi(0) must be 0")
        if np.any(np.diff(y) <= 0):
            raise ValueError("Phi must be strictly increasing")
        d2 = y[2:] - 2 * y[1:-1] + y[:-2]
        if np.any(d2 < -1e-9 * np.maximum(1.0, np.abs(y[1:-1]))):
            raise ValueError("Phi fails the convexity check")

    def __repr__(self):
        if self.kind == "lq":
            return f"DiscreteBFS(lq, q={self.q})"
        return f"DiscreteBFS(luxemburg, {self.phi.to_dict()})"

    @property
    def exponent(self):
        return self.q

    def _check_space(self, space):
        if space is not self.space and space != self.space:
            raise ValueError("function lives on a different measure space than E")

    def norm(self, space, values):
        self._check_space(space)
        a = np.abs(np.asarray(values, dtype=np.float64)).ravel()
        if self.kind == "lq":
            return weighted_lp(a, space.weights, self.q)
        return float(_luxemburg_rows(a[None, :], space.weights, self.phi)[0])

    def rows(self, space, a):
        self._check_space(space)
        if self.kind == "lq":
            return kernels.lp_rows(a, space.weights, self.q)
        return _luxemburg_rows(a, space.weights, self.phi)

    def pairwise(self, space, values, q):
        self._check_space(space)
        if self.kind == "lq":
            return kernels.pairwise_lp(values, space.weights, self.q, q)
        values = np.asarray(values, dtype=np.float64)
        L = values.shape[0]
        out = np.zeros((L, L))
        for i in range(L - 1):
            pw = kernels.vector_norms(
                (values[i + 1:] - values[i]).reshape(-1, values.shape[2]), q
            ).reshape(L - i - 1, -1)
            out[i, i + 1:] = _luxemburg_rows(pw, space.weights, self.phi)
        return out + out.T

    def indicator(self, space, mask):
        mask = np.asarray(mask, dtype=bool)
        if self.kind == "lq":
            return subset_measure(space, mask) ** (1.0 / self.q)
        return self.norm(space, mask.astype(np.float64))

    def fundamental(self, mass):
        """Norm of the indicator of any set of the given measure."""
        if mass <= 0:
            return 0.0
        if self.kind == "lq":
            return mass ** (1.0 / self.q)
        return 1.0 / self.phi.inverse(1.0 / mass)

    def tightness_threshold(self, eps, r):
        """Largest mass m with ``r * fundamental(m) <= eps``."""
        if self.kind == "lq":
            return eps ** self.q / r ** self.q
        return 1.0 / float(self.phi(r / eps))

    def to_dict(self):
        if self.kind == "lq":
            return {"kind": "lq", "q": self.q}
        return {"kind": "luxemburg", **self.phi.to_dict()}


def bfs_from_dict(space, d):
    """Build a :class:`DiscreteBFS` on ``space`` from its ``to_dict`` form."""
    kind = d.get("kind", "lq")
    if kind == "lq":
        return DiscreteBFS(space, "lq", q=d.get("q", 1.0))
    return DiscreteBFS(space, "luxemburg", phi=young_from_dict(d))


def e_norm(f, E):
    """Norm in E of ``|f|`` for a :class:`ScalarSample` or raw values."""
    if isinstance(f, ScalarSample):
        return E.norm(f.space, f.values)
    return E.norm(E.space, f)


def e_bochner_norm(F, E):
    return E.norm(F.space, F.pointwise_norms())


def ui_modulus_E(prefix, E, r):
    from .criteria import ui_modulus

    return ui_modulus(prefix, E, r)


def luxemburg_modular(E, values, lam):
    """``sum_i mu_i Phi(|f_i| / lam)``."""
    a = np.abs(np.asarray(values, dtype=np.float64))
    return float(np.sum(E.space.weights * E.phi(a / lam)))


@dataclass(frozen=True)
class OrderInterval:
    """``[-center, center] + B(slack)`` in E."""

    center: np.ndarray
    slack: float
    E: DiscreteBFS = field(repr=False)

    def decompose(self, y):
        """Split ``y`` as ``u + v`` with ``|u| <= center`` pointwise."""
        y = np.asarray(y, dtype=np.float64)
        u = np.clip(y, -self.center, self.center)
        return u, y - u

    def residual(self, y):
        _, v = self.decompose(y)
        return self.E.norm(self.E.space, v)

    def contains(self, y):
        return self.residual(y) < self.slack


def almost_order_bounded_gap(prefix, E, eps, max_level=None, grid_size=64):
    """Order interval ``[-x, x] + B(eps)`` containing every ``||f_n(.)||``.

    ``x`` is the pointwise envelope of the prefix truncated at the smallest
    level of a geometric grid (ratio 2, topped by the envelope maximum or
    ``max_level``) that brings every residual below ``eps``.  Returns the
    interval and the worst residual.
    """
    prefix = as_prefix(prefix)
    if not eps > 0:
        raise ValueError("eps must be positive")
    pw = prefix.pointwise_norms
    env = pw.max(axis=0)
    top = float(env.max())
    if max_level is not None:
        top = min(top, float(max_level))
    levels = [top * 0.5 ** k for k in range(grid_size)] + [0.0] if top > 0 else [0.0]

    def worst(level):
        return float(E.rows(prefix.space, np.maximum(pw - level, 0.0)).max())

    best = None
    for level in levels:  # descending; residual is nondecreasing along the grid
        res = worst(level)
        if res < eps:
            best = (level, res)
        else:
            break
    if best is None:
        raise GridExhausted(top, worst(top))
    level, res = best
    return OrderInterval(np.minimum(env, level), float(eps), E), res


class IndicatorInfimum(float):
    """A float carrying how it was obtained.

    ``exhaustive`` is false when the atom budget forced the fallback, in
    which case the value is a certified lower bound.
    """

    def __new__(cls, value, exhaustive, mask=None):
        obj = super().__new__(cls, value)
        obj.exhaustive = exhaustive
        obj.mask = mask
        return obj


def _subset_masses(w):
    m = np.zeros(1)
    for x in w:
        m = np.concatenate([m, m + x])
    return m


def indicator_norm_infimum(E, r):
    """``min { ||1_A||_E : mu(A) >= r }`` over all atom subsets."""
    space = E.space
    r = float(r)
    if not 0 < r <= space.total_mass:
        raise ValueError(f"need 0 < r <= total mass {space.total_mass}")
    A = space.atom_count
    if A > EXHAUSTIVE_ATOM_LIMIT:
        # the norm of an indicator only depends on the measure of the set
        # and is nondecreasing in it, so the value at mass r is a lower bound
        return IndicatorInfimum(E.fundamental(r), False)
    masses = _subset_masses(space.weights)
    slack = 1e-12 * space.total_mass
    # Fast masses may be off by rounding; settle feasibility with exact sums.
    # The indicator norm is nondecreasing in the measure, so only sets of
    # (nearly) minimal feasible measure can attain the minimum.
    feasible = np.nonzero(masses >= r - slack)[0]
    feasible = feasible[np.argsort(masses[feasible], kind="stable")]
    bits_of = lambda idx: ((idx[:, None] >> np.arange(A)) & 1).astype(bool)  # noqa: E731
    start, first = 0, None
    while first is None:
        chunk = feasible[start:start + 4096]
        if chunk.size == 0:  # unreachable: the full set is always feasible
            raise AssertionError("no feasible subset found")
        exact = np.array([subset_measure(space, b) for b in bits_of(chunk)])
        hit = np.nonzero(exact >= r)[0]
        if hit.size:
            first = masses[chunk[hit[0]]]
        start += chunk.size
    cand = feasible[masses[feasible] <= first * (1 + 1e-9) + slack]
    bits = bits_of(cand)
    bits = bits[np.array([subset_measure(space, b) >= r for b in bits])]
    if E.kind == "lq":
        vals = np.array([E.indicator(space, b) for b in bits])
    else:
        vals = E.rows(space, bits.astype(np.float64))
    k = int(np.argmin(vals))
    return IndicatorInfimum(float(vals[k]), True, bits[k])


def _value_set(space, ambient, values, budget):
    """Values of one member on the heaviest atoms until the leftover mass is <= budget."""
    order = np.argsort(-space.weights, kind="stable")
    w = space.weights[order]
    left = np.array([math.fsum(w[k:]) for k in range(len(w) + 1)])
    k = int(np.argmax(left <= budget))
    return values[order[:k]]


@dataclass
class WitnessRecord:
    selected: list
    pairs: list
    lower_bound: float
    indicator_infimum: float
    eps0: float
    delta0: float
    cover_sizes: list

    def to_dict(self):
        return {
            "selected": self.selected, "pairs": self.pairs, "lower_bound": self.lower_bound,
            "indicator_infimum": self.indicator_infimum, "eps0": self.eps0,
            "delta0": self.delta0, "cover_sizes": self.cover_sizes,
        }


def nontight_divergence_witness(prefix, E, eps0, delta0):
    """Search the prefix for members that stay ``delta0``-apart on large sets.

    Builds increasing finite value sets K_m with ``mu(f_j not in K_m) <=
    eps0 / 2`` for the selected members so far and selects the next member
    leaving ``K_m + B(delta0)`` on mass ``> eps0``.  Every selected pair then
    satisfies ``||f_n - f_m||_E(X) >= delta0 * ||1_Omega_mn||_E >= delta0 *
    inf{||1_A|| : mu(A) >= eps0 / 2}``.
    """
    prefix = as_prefix(prefix)
    if not (eps0 > 0 and delta0 > 0):
        raise ValueError("eps0 and delta0 must be positive")
    space, amb = prefix.space, prefix.ambient
    w = space.weights

    def value_set(n):
        return _value_set(space, amb, prefix.values[n], 0.5 * eps0)

    selected = [0]
    covers = [value_set(0)]
    for n in range(1, len(prefix)):
        K = CompactCover(amb, covers[-1], 0.0)
        far = K.distance(prefix.values[n]) >= delta0
        if math.fsum(w[far]) > eps0:
            selected.append(n)
            covers.append(np.unique(np.vstack([covers[-1], value_set(n)]), axis=0))
    if len(selected) < 2:
        raise NoWitnessFound(
            f"no member leaves K + B({delta0}) on mass > {eps0}; the prefix looks tight"
        )
    inf = indicator_norm_infimum(E, min(0.5 * eps0, space.total_mass))
    if not inf > 0:
        raise AssertionError("indicator infimum must be positive")
    pairs = []
    for a, m in enumerate(selected):
        Km = CompactCover(amb, covers[a], 0.0)
        in_m = Km.contains(prefix.values[m])
        for n in selected[a + 1:]:
            omega = in_m & (Km.distance(prefix.values[n]) >= delta0)
            mu = subset_measure(space, omega)
            gap = amb.norms(prefix.values[n] - prefix.values[m])
            dist = E.norm(space, gap)
            ind = E.indicator(space, omega)
            ok = (mu >= 0.5 * eps0 and np.all(gap[omega] >= delta0)
                  and dist >= delta0 * ind * (1 - 1e-12) and ind >= inf * (1 - 1e-12))
            if not ok:
                raise AssertionError(f"witness inequality fails for pair ({m}, {n})")
            pairs.append({"pair": [int(prefix.indices[m]), int(prefix.indices[n])],
                          "omega_measure": mu, "indicator_norm": ind, "distance": dist})
    return WitnessRecord([int(prefix.indices[i]) for i in selected], pairs,
                         float(delta0 * inf), float(inf), float(eps0), float(delta0),
                         [len(c) for c in covers])
