"""Named synthetic families, one per behaviour of the three criteria.

========================  ===========================================
name                      behaviour
========================  ===========================================
``constant``              every criterion holds trivially
``convergent``            ``f + 2^-n g``; relatively compact
``rotating``              values on a circle; relatively compact
``escaping_basis``        ``f_n == e_n``; not uniformly tight
``mass_escape``           mass on shrinking atoms; not uniformly integrable
``scaled_blowup``         ``n g``; unbounded, scalar covering numbers diverge
========================  ===========================================

Member ``i`` (0-based) corresponds to ``n = i + 1`` in the formulas.
"""
from __future__ import annotations

import math

import numpy as np

from ..ambient import AmbientSpace
from ..bochner import FunctionFamily
from ..measure import MeasureSpace

FAMILY_NAMES = ("constant", "convergent", "rotating", "escaping_basis", "mass_escape",
                "scaled_blowup")


def _unit(dim, k=0):
    e = np.zeros(dim)
    e[k] = 1.0
    return e


def _vector(params, key, dim, default):
    v = np.asarray(params.get(key, default), dtype=np.float64).ravel()
    if v.size != dim:
        raise ValueError(f"parameter {key!r} must have {dim} entries, got {v.size}")
    return v


def _circle_table(atoms, dim, scale=1.0):
    k = np.arange(atoms)
    t = np.zeros((atoms, dim))
    t[:, 0] = np.cos(2 * np.pi * k / atoms)
    if dim > 1:
        t[:, 1] = np.sin(2 * np.pi * k / atoms)
    return scale * t


class _Constant:
    def __init__(self, table):
        self.table = table

    def __call__(self, i):
        return self.table


class _Convergent:
    def __init__(self, base, direction):
        self.base, self.direction = base, direction

    def __call__(self, i):
        return self.base + 2.0 ** (-(i + 1)) * self.direction


class _Rotating:
    def __init__(self, base, step):
        self.base, self.step = base, step

    def __call__(self, i):
        a = (i + 1) * self.step
        c, s = math.cos(a), math.sin(a)
        R = np.array([[c, -s], [s, c]])
        return self.base @ R.T


class _EscapingBasis:
    def __init__(self, atoms, dim):
        self.atoms, self.dim = atoms, dim

    def __call__(self, i):
        return np.tile(_unit(self.dim, i % self.dim), (self.atoms, 1))


class _MassEscape:
    def __init__(self, weights, dim, p):
        self.weights, self.dim, self.p = weights, dim, p

    def __call__(self, i):
        A = self.weights.size
        k = min(i, A - 1)
        t = np.zeros((A, self.dim))
        t[k, 0] = self.weights[k] ** (-1.0 / self.p)
        return t


class _ScaledBlowup:
    def __init__(self, table):
        self.table = table

    def __call__(self, i):
        return (i + 1) * self.table


def dyadic_space(atoms):
    """Weights 1/2, 1/4, ..., 2^-(A-1), 2^-(A-1) (total mass exactly 1)."""
    if atoms < 2:
        raise ValueError("dyadic space needs at least two atoms")
    w = 2.0 ** -np.arange(1, atoms)
    return MeasureSpace(np.append(w, w[-1]))


def _default_space(name, params):
    if name == "mass_escape":
        return dyadic_space(int(params.get("atoms", 40)))
    atoms = int(params.get("atoms", 64 if name == "rotating" else 8))
    if atoms < 1:
        raise ValueError("atoms must be positive")
    return MeasureSpace.uniform(atoms)


def _default_ambient(name, params):
    dim = int(params.get("dim", 256 if name == "escaping_basis" else 2))
    return AmbientSpace(dim, params.get("norm", "l2"))


def make_family(name, params=None, space=None, ambient=None):
    """Build a named family; ``space`` and ``ambient`` default per family."""
    params = dict(params or {})
    if name not in FAMILY_NAMES:
        raise ValueError(f"unknown family {name!r}; choose from {', '.join(FAMILY_NAMES)}")
    space = space or _default_space(name, params)
    ambient = ambient or _default_ambient(name, params)
    A, d = space.atom_count, ambient.dim

    if name == "constant":
        if "table" in params:
            table = np.asarray(params["table"], dtype=np.float64).reshape(A, d)
        else:
            table = np.tile(_vector(params, "value", d, _unit(d)), (A, 1))
        gen = _Constant(table)
    elif name == "convergent":
        base = np.asarray(params["base"], dtype=np.float64).reshape(A, d) if "base" in params \
            else _circle_table(A, d, 0.5)
        u = _vector(params, "direction", d, _unit(d))
        nu = float(ambient.norms(u))
        if nu == 0:
            raise ValueError("direction must be nonzero")
        # a constant direction of norm one has Bochner norm mu(Omega)^(1/p) = 1
        gen = _Convergent(base, np.tile(u / nu, (A, 1)))
    elif name == "rotating":
        if d != 2:
            raise ValueError("rotating family needs a 2-dimensional ambient space")
        step = float(params.get("step", 0.01))
        gen = _Rotating(_circle_table(A, 2, float(params.get("radius", 1.0))), step)
    elif name == "escaping_basis":
        gen = _EscapingBasis(A, d)
    elif name == "mass_escape":
        p = float(params.get("p", 1.0))
        if p < 1:
            raise ValueError("mass_escape needs p >= 1")
        gen = _MassEscape(space.weights, d, p)
    else:
        u = _vector(params, "direction", d, _unit(d))
        gen = _ScaledBlowup(np.tile(u, (A, 1)))
    return FunctionFamily(space, ambient, gen, name=name, params=params)
