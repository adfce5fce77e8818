"""Uniform integrability, tightness and scalar compactness as computable moduli."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .ambient import CompactCover
from .bochner import as_prefix, cover_masks
from .measure import as_norm


def _norm_label(norm):
    return norm.to_dict() if hasattr(norm, "to_dict") else repr(norm)


@dataclass(frozen=True)
class UICertificate:
    """Every prefix member satisfies ``||1_{||f|| > r} f|| <= bound``."""

    r: float
    bound: float
    p: object
    audit: dict = field(default_factory=dict, compare=False)

    def verify(self, prefix, tol=1e-9):
        return ui_modulus(prefix, self.p, self.r) <= self.bound + tol

    def to_dict(self):
        return {"r": self.r, "bound": self.bound, "norm": _norm_label(as_norm(self.p)),
                "audit": self.audit}


@dataclass(frozen=True)
class TightnessCertificate:
    """Every prefix member satisfies ``mu({f not in cover}) <= eps``."""

    cover: CompactCover
    eps: float
    audit: dict = field(default_factory=dict, compare=False)

    def verify(self, prefix, tol=1e-12):
        return tightness_deficiency(prefix, self.cover) <= self.eps + tol

    def to_dict(self):
        return {"cover": self.cover.to_dict(), "eps": self.eps, "audit": self.audit}


@dataclass(frozen=True)
class ScalarReport:
    """Greedy covering numbers of ``{<f, x*>}`` per functional and scale."""

    functionals: np.ndarray
    eps_grid: np.ndarray
    table: np.ndarray  # (functionals, scales)

    def to_dict(self):
        return {
            "functionals": self.functionals.tolist(),
            "eps_grid": self.eps_grid.tolist(),
            "covering_numbers": self.table.tolist(),
        }

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["functional", "eps", "covering_number"])
        for i in range(self.table.shape[0]):
            for j, e in enumerate(self.eps_grid):
                w.writerow([i, repr(float(e)), int(self.table[i, j])])
        return buf.getvalue()


def tail_norms(prefix, p, r):
    """Per-member norm of the strict tail piece ``1_{||f|| > r} f``."""
    if not r > 0:
        raise ValueError("radius must be positive")
    prefix = as_prefix(prefix)
    norm = as_norm(p)
    pw = prefix.pointwise_norms
    return norm.rows(prefix.space, np.where(pw > r, pw, 0.0))


def ui_modulus(prefix, p, r):
    """``sup_f ||1_{||f|| > r} f||`` over the prefix."""
    return float(tail_norms(prefix, p, r).max())


def ui_curve(prefix, p, radii):
    return np.array([ui_modulus(prefix, p, r) for r in radii])


def ui_curve_csv(radii, values):
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["r", "ui_modulus"])
    for r, v in zip(radii, values):
        w.writerow([repr(float(r)), repr(float(v))])
    return buf.getvalue()


def outside_measures(prefix, cover):
    """Per-member ``mu({f not in cover})``."""
    prefix = as_prefix(prefix)
    out = ~cover_masks(prefix, cover)
    return out.astype(np.float64) @ prefix.space.weights


def tightness_deficiency(prefix, cover):
    """``sup_f mu({f not in cover})`` over the prefix."""
    return float(outside_measures(prefix, cover).max())


def certify_ui(prefix, p, r):
    """Certificate at radius ``r`` whose bound is the measured modulus."""
    return UICertificate(float(r), ui_modulus(prefix, p, r), p)


def certify_tightness(prefix, cover):
    return TightnessCertificate(cover, tightness_deficiency(prefix, cover))


def geometric_grid(start=1.0, count=12, ratio=0.5):
    return start * ratio ** np.arange(count)


def default_functionals(dim):
    return np.eye(dim)[: min(dim, 16)]


def scalar_family(prefix, functional):
    """(L, atoms) table of ``<f_n(omega), x*>``."""
    prefix = as_prefix(prefix)
    x = np.asarray(functional, dtype=np.float64).ravel()
    if x.size != prefix.ambient.dim:
        raise ValueError("functional dimension does not match the ambient space")
    return prefix.values @ x


def scalar_covering_numbers(prefix, p, functional, eps_grid):
    prefix = as_prefix(prefix)
    norm = as_norm(p)
    s = scalar_family(prefix, functional)
    D = norm.pairwise(prefix.space, s[..., None], 1.0)
    order, radii = kernels.farthest_first(D)
    return np.array([1 + int(np.count_nonzero(radii[1:] > e)) for e in eps_grid], dtype=np.int64)


def scalar_compactness_report(prefix, p, functionals=None, eps_grid=None):
    prefix = as_prefix(prefix)
    if functionals is None:
        functionals = default_functionals(prefix.ambient.dim)
    F = np.atleast_2d(np.asarray(functionals, dtype=np.float64))
    if F.shape[0] == 0:
        raise ValueError("at least one functional is required")
    grid = geometric_grid() if eps_grid is None else np.asarray(eps_grid, dtype=np.float64)
    if np.any(grid <= 0):
        raise ValueError("eps grid must be positive")
    table = np.stack([scalar_covering_numbers(prefix, p, x, grid) for x in F])
    return ScalarReport(F, grid, table)
