"""Finite atomic measure spaces and weighted scalar L^p norms."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels


def _readonly(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


class MeasureSpace:
    """A finite set of atoms carrying positive weights.

    Parameters
    ----------
    weights : array_like
        Mass of each atom; every entry must be positive and finite.
    normalize : bool
        Rescale the weights to total mass 1 (the default).  Operations never
        renormalize afterwards.
    """

    def __init__(self, weights, normalize=True):
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.size == 0:
            raise ValueError("a measure space needs at least one atom")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("atom weights must be positive and finite")
        if normalize:
            s = math.fsum(w)
            if s != 1.0:
                w = w / s
        self._weights = _readonly(w)
        self._normalized = bool(normalize)
        self._total = math.fsum(self._weights)

    @classmethod
    def uniform(cls, atom_count):
        return cls(np.ones(int(atom_count)))

    @property
    def weights(self):
        return self._weights

    @property
    def atom_count(self):
        return self._weights.size

    @property
    def total_mass(self):
        return self._total

    @property
    def normalized(self):
        return self._normalized

    def __eq__(self, other):
        if not isinstance(other, MeasureSpace):
            return NotImplemented
        return self._normalized == other._normalized and np.array_equal(
            self._weights, other._weights
        )

    def __hash__(self):
        return hash((self._normalized, self._weights.tobytes()))

    def __repr__(self):
        return f"MeasureSpace(atoms={self.atom_count}, total_mass={self._total!r})"

    def to_dict(self):
        return {"weights": self._weights.tolist(), "normalized": self._normalized}

    @classmethod
    def from_dict(cls, d):
        return cls(d["weights"], normalize=d.get("normalized", True))


@dataclass(frozen=True, eq=False)
class ScalarSample:
    """A real function on the atoms of ``space``."""

    space: MeasureSpace
    values: np.ndarray

    def __post_init__(self):
        v = _readonly(self.values).ravel()
        if v.size != self.space.atom_count:
            raise ValueError(
                f"sample has {v.size} values but the space has "
                f"{self.space.atom_count} atoms"
            )
        object.__setattr__(self, "values", v)


def _check_exponent(p):
    p = float(p)
    if not p >= 1.0 or not math.isfinite(p):
        raise ValueError(f"invalid exponent p={p}; need 1 <= p < inf")
    return p


def weighted_lp(values, weights, p):
    """``(sum_i w_i |v_i|^p)^(1/p)`` with max-scaling and exact summation."""
    a = np.abs(np.asarray(values, dtype=np.float64))
    m = float(a.max()) if a.size else 0.0
    if m == 0.0:
        return 0.0
    s = a / m
    if p != 1.0:
        s = s ** p
    return m * math.fsum(np.asarray(weights) * s) ** (1.0 / p)


def lp_norm(f, p):
    """Weighted L^p norm of a :class:`ScalarSample`."""
    p = _check_exponent(p)
    return weighted_lp(f.values, f.space.weights, p)


def subset_measure(space, mask):
    """Total weight of the atoms where ``mask`` is true."""
    m = np.asarray(mask, dtype=bool).ravel()
    if m.size != space.atom_count:
        raise ValueError(
            f"mask has {m.size} entries but the space has {space.atom_count} atoms"
        )
    return math.fsum(space.weights[m])


class LpNorm:
    """The scalar L^p(mu) norm, in the form the family algorithms consume.

    Anything with the same methods (notably
    :class:`lpcompact.bfspace.DiscreteBFS`) can be passed wherever an
    exponent is accepted.
    """

    def __init__(self, p):
        self.p = _check_exponent(p)

    @property
    def exponent(self):
        return self.p

    def __repr__(self):
        return f"LpNorm(p={self.p})"

    def norm(self, space, values):
        return weighted_lp(values, space.weights, self.p)

    def rows(self, space, a):
        return kernels.lp_rows(a, space.weights, self.p)

    def pairwise(self, space, values, q):
        return kernels.pairwise_lp(values, space.weights, self.p, q)

    def indicator(self, space, mask):
        return subset_measure(space, mask) ** (1.0 / self.p)

    def tightness_threshold(self, eps, r):
        """Largest exceptional mass m with ``r * ||1_A|| <= eps`` whenever mu(A) <= m."""
        return eps ** self.p / r ** self.p

    def to_dict(self):
        return {"kind": "lp", "p": self.p}


def as_norm(p):
    """Turn an exponent into an :class:`LpNorm`; pass norm objects through."""
    if isinstance(p, (int, float, np.integer, np.floating)):
        return LpNorm(p)
    if hasattr(p, "rows") and hasattr(p, "pairwise"):
        return p
    raise TypeError(f"expected an exponent or a norm object, got {type(p).__name__}")
