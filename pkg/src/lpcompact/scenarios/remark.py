"""The two-point counterexample: relatively compact and scalarly compact,
but not compact because the zero function is missing.

Functions take values in the closed unit ball of the Euclidean plane and the
scalar image of ``f`` under ``c`` is formed atomwise as ``<f(omega), c>``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from ..ambient import AmbientSpace
from ..bochner import FunctionFamily
from ..measure import MeasureSpace

BALL_TOL = 1e-12


@lru_cache(maxsize=8)
def unit_ball_grid(resolution):
    """Grid points of the closed unit disc sorted by (norm, x, y); row 0 is the origin."""
    h = float(resolution)
    if not 0 < h <= 1:
        raise ValueError("grid resolution must lie in (0, 1]")
    k = np.arange(-math.floor(1.0 / h), math.floor(1.0 / h) + 1) * h
    x, y = np.meshgrid(k, k, indexing="ij")
    pts = np.column_stack([x.ravel(), y.ravel()])
    r = np.hypot(pts[:, 0], pts[:, 1])
    keep = r <= 1.0 + BALL_TOL
    pts, r = pts[keep], r[keep]
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0], r))]
    pts.setflags(write=False)
    return pts


class _RemarkGenerator:
    """Member i is the pair of grid points enumerated shell by shell.

    Pair number j = i + 1 (j = 0 is the excluded zero function) sits on
    shell s = isqrt(j); shells list pairs whose larger grid rank is s, so
    small-norm functions come first.
    """

    def __init__(self, grid):
        self.grid = grid

    def __call__(self, i):
        j = i + 1
        s = math.isqrt(j)
        k = j - s * s
        a, b = (k, s) if k < s else (s, k - s)
        return np.stack([self.grid[a], self.grid[b]])


def remark_family(resolution=0.05):
    """Two atoms of mass 1/2, X = Euclidean plane, all nonzero grid functions."""
    space = MeasureSpace([0.5, 0.5])
    ambient = AmbientSpace(2, "l2")
    grid = unit_ball_grid(float(resolution))
    fam = FunctionFamily(space, ambient, _RemarkGenerator(grid), name="remark",
                         params={"resolution": float(resolution)},
                         size=grid.shape[0] ** 2 - 1)
    return space, ambient, fam


@dataclass
class RemarkCheck:
    c: list
    y: float
    values: list
    pairings: list
    norms: list
    in_unit_ball: bool
    nonzero: bool
    pairing_matches: bool
    resolution: float
    image_min: float
    image_max: float
    max_gap: float
    covered: bool

    @property
    def ok(self):
        return self.in_unit_ball and self.nonzero and self.pairing_matches and self.covered

    def to_dict(self):
        d = asdict(self)
        d["ok"] = self.ok
        return d


def remark_function(c, y):
    """Unit-ball valued f with ``<f(omega_i), c> = y`` at both atoms, never zero."""
    c = np.asarray(c, dtype=np.float64).ravel()
    nc = math.hypot(c[0], c[1])
    if nc == 0:
        raise ValueError("c must be nonzero")
    if abs(y) > nc * (1 + 1e-12):
        raise ValueError(f"|y| = {abs(y)} exceeds |c| = {nc}; unattainable by Cauchy-Schwarz")
    if y != 0:
        v = c * (y / nc ** 2)
    else:
        v = np.array([c[1], -c[0]]) / nc
    return np.stack([v, v])


def remark_scalar_image_check(c, y, resolution=1e-2):
    c = np.asarray(c, dtype=np.float64).ravel()
    if c.size != 2:
        raise ValueError("c must be a vector in the plane")
    f = remark_function(c, float(y))
    nc = math.hypot(c[0], c[1])
    pair = f @ c
    norms = np.hypot(f[:, 0], f[:, 1])
    grid = unit_ball_grid(float(resolution))
    img = np.sort(grid @ c)
    gap = float(np.max(np.diff(img))) if img.size > 1 else math.inf
    tol = float(resolution)
    covered = bool(img[0] <= -nc + tol and img[-1] >= nc - tol and gap <= 2 * tol)
    return RemarkCheck(
        c=c.tolist(), y=float(y), values=f.tolist(), pairings=pair.tolist(),
        norms=norms.tolist(), in_unit_ball=bool(np.all(norms <= 1 + BALL_TOL)),
        nonzero=bool(np.any(f != 0)),
        pairing_matches=bool(np.all(np.abs(pair - y) <= 1e-12 * max(1.0, nc))),
        resolution=tol, image_min=float(img[0]), image_max=float(img[-1]),
        max_gap=gap, covered=covered,
    )
