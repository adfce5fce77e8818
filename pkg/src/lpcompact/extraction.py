"""Subsequence extraction with certified pairwise bounds.

The pipeline quantizes each member against a finite net, projects onto the
span of the first N basis vectors, clusters the projected members and
returns the largest cluster.  :func:`theorem1_extract` wraps it with the
truncation/tightness bookkeeping that turns a cluster of restricted members
into a cluster of original members within ``7 * eps``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .ambient import CompactCover
from .bochner import (
    Prefix,
    VectorFunction,
    as_prefix,
    pairwise_distances,
    restrict_to_cover,
    traversal,
)
from .criteria import TightnessCertificate, UICertificate, outside_measures, tail_norms
from .errors import CertificateRefused, ChainViolation, ExtractionExhausted, PreconditionViolation
from .measure import as_norm

VERIFY_TOL = 1e-9


def _leq(a, b, rel=1e-12):
    return a <= b + rel * (1.0 + abs(b))


@dataclass(frozen=True)
class Quantization:
    step_function: VectorFunction
    assignment: np.ndarray
    sup_error: float
    net: CompactCover


@dataclass
class SubsequenceCertificate:
    """Family indices whose members are pairwise within ``pairwise_bound``."""

    indices: tuple
    pairwise_bound: float
    budget: dict = field(default_factory=dict)
    measured_max: float = 0.0
    pair_table: list = field(default_factory=list)

    def __len__(self):
        return len(self.indices)

    def verify(self, prefix, p, tol=VERIFY_TOL):
        """Recompute every pairwise distance among the indices directly."""
        prefix = as_prefix(prefix)
        sub = prefix.take(prefix.positions_of(self.indices))
        D = pairwise_distances(sub, p)
        return float(D.max()) <= self.pairwise_bound + tol

    def to_dict(self):
        return {
            "indices": [int(i) for i in self.indices],
            "pairwise_bound": self.pairwise_bound,
            "measured_max": self.measured_max,
            "budget": self.budget,
            "pairs": self.pair_table,
        }


def quantize_first_min(F, net):
    """Replace every value of ``F`` by its first nearest net center."""
    if len(net) == 0:
        raise ValueError("quantization needs a nonempty net")
    if net.space.dim != F.ambient.dim:
        raise ValueError("net and function have different dimensions")
    assign, dist = kernels.first_min_assign(F.values, net.centers, F.ambient.q)
    step = VectorFunction(F.space, F.ambient, net.centers[assign])
    return Quantization(step, assign, float(dist.max()), net)


@dataclass(frozen=True)
class ProjectionDefect:
    defect: float
    bound: float
    projection_norm: float
    quantized_defect: float
    error_defect: float


def _basis_support(ambient, centers, tol=1e-12):
    """Smallest N such that all centers lie in the span of the first N basis vectors."""
    c = ambient.coordinates(centers)
    if c.size == 0:
        return 1
    scale = max(1.0, float(np.abs(c).max()))
    nz = np.abs(c) > tol * scale
    cols = np.nonzero(nz.any(axis=0))[0]
    return max(1, int(cols.max()) + 1) if cols.size else 1


def projection_defect(F, quant, N, p=2.0):
    """``||F - P_N F||`` together with the bound ``(1 + ||P_N||) * sup_error``.

    The net behind ``quant`` must lie in X_N.
    """
    norm = as_norm(p)
    amb = F.ambient
    centers = quant.net.centers
    resid = amb.norms(centers - amb.project(centers, N))
    scale = 1.0 + (float(amb.norms(centers).max()) if len(centers) else 0.0)
    if resid.size and resid.max() > 1e-12 * scale:
        raise PreconditionViolation(
            f"net centers are not in X_{N} (max distance {resid.max():.3g})"
        )
    pn = amb.projection_operator_norm(N)
    space = F.space
    defect = norm.norm(space, amb.norms(F.values - amb.project(F.values, N)))
    qv = quant.step_function.values
    qdef = norm.norm(space, amb.norms(qv - amb.project(qv, N)))
    err = qv - F.values
    edef = norm.norm(space, amb.norms(err - amb.project(err, N)))
    whole = norm.indicator(space, np.ones(space.atom_count, dtype=bool))
    bound = (1.0 + pn) * quant.sup_error * whole
    if not (_leq(defect, qdef + edef) and _leq(edef, bound)):
        raise ChainViolation(
            f"projection defect {defect!r} exceeds (1+||P_N||)*sup_error bound {bound!r}"
        )
    return ProjectionDefect(float(defect), float(bound), pn, float(qdef), float(edef))


def _cluster_positions(D, positions, eps):
    """Largest cluster of ``positions`` around a greedy eps/2 net (positions sorted)."""
    positions = np.asarray(positions, dtype=np.int64)
    sub = D[np.ix_(positions, positions)]
    order, radii = kernels.farthest_first(sub)
    k = 1 + int(np.count_nonzero(radii[1:] > eps / 2.0))
    centers = np.sort(order[:k])
    label = np.argmin(sub[:, centers], axis=1)
    counts = np.bincount(label, minlength=k)
    best = counts.max()
    # ties: the cluster holding the smallest member
    first_member = np.array([np.nonzero(label == c)[0].min() if counts[c] else len(positions)
                             for c in range(k)])
    cand = np.nonzero(counts == best)[0]
    chosen = cand[np.argmin(first_member[cand])]
    return positions[label == chosen], k


def cluster_extract(prefix, p, eps, distances=None):
    """Family indices of the largest cluster at scale ``eps``.

    All returned members are pairwise within ``eps`` and there are at least
    ``ceil(L / covering_number(prefix, p, eps / 2))`` of them.
    """
    prefix = as_prefix(prefix)
    if len(prefix) == 0:
        raise ValueError("empty prefix")
    if not eps > 0:
        raise ValueError("eps must be positive")
    D = pairwise_distances(prefix, p) if distances is None else distances
    pos, _ = _cluster_positions(D, np.arange(len(prefix)), eps)
    return prefix.indices[pos]


def _measured_max(D, pos):
    if len(pos) < 2:
        return 0.0
    return float(D[np.ix_(pos, pos)].max())


def diagonal_extract(prefix, p, schedule):
    """Refine through a decreasing scale schedule by repeated clustering.

    The returned indices are the final-stage cluster; ``budget["diagonal"]``
    lists the m-th survivor of stage m where it exists.  The pairwise bound
    is the directly measured diameter, which never exceeds the last scale.
    """
    prefix = as_prefix(prefix)
    sched = [float(e) for e in schedule]
    if not sched:
        raise ValueError("empty schedule")
    if any(e <= 0 for e in sched) or any(b >= a for a, b in zip(sched, sched[1:])):
        raise ValueError("schedule must be positive and strictly decreasing")
    D = pairwise_distances(prefix, p)
    pos = np.arange(len(prefix))
    sizes, diagonal = [], []
    for m, e in enumerate(sched, start=1):
        if len(pos) < 2:
            raise ExtractionExhausted(m - 1, sizes)
        nxt, _ = _cluster_positions(D, pos, e)
        if len(nxt) < 2:
            raise ExtractionExhausted(m - 1, sizes)
        pos = nxt
        sizes.append(len(pos))
        diagonal.append(int(prefix.indices[pos[m - 1]]) if len(pos) >= m else None)
    measured = _measured_max(D, pos)
    budget = {"schedule": sched, "stage_sizes": sizes, "diagonal": diagonal,
              "last_scale": sched[-1]}
    return SubsequenceCertificate(tuple(int(i) for i in prefix.indices[pos]), measured,
                                  budget, measured)


def _check_in_cover(prefix, cover):
    d = cover.distance(prefix.values)
    bad = d > cover.radius
    if bad.any():
        n, a = np.argwhere(bad)[0]
        raise PreconditionViolation(
            f"member {int(prefix.indices[n])} leaves the cover at atom {int(a)} "
            f"(distance {d[n, a]:.6g} > radius {cover.radius:.6g})",
            member=int(prefix.indices[n]), atom=int(a),
        )


def _lemma_net(prefix, cover, eps):
    amb = prefix.ambient
    if cover.radius < eps and len(cover):
        return cover.centers, "cover"
    pts = np.unique(prefix.pooled_values(), axis=0)
    idx = kernels.farthest_first_points(pts, amb.q, eps * (1.0 - 1e-9))
    return pts[idx], "greedy"


def lemma_extract(prefix, cover, p, eps, eps_prime=None):
    """Cauchy-type subsequence for a family with values in a fixed cover.

    Returns a certificate with pairwise bound
    ``2 * (1 + ||P_N||) * eps * ||1_Omega|| + eps_prime`` (the last factor is
    1 on probability spaces).
    """
    prefix = as_prefix(prefix)
    norm = as_norm(p)
    if not eps > 0:
        raise ValueError("eps must be positive")
    eps_prime = float(eps if eps_prime is None else eps_prime)
    if not eps_prime > 0:
        raise ValueError("eps_prime must be positive")
    _check_in_cover(prefix, cover)
    amb, space = prefix.ambient, prefix.space

    centers, source = _lemma_net(prefix, cover, eps)
    N = _basis_support(amb, centers)
    centers = amb.project(centers, N)
    net = CompactCover(amb, centers, eps)
    pn = amb.projection_operator_norm(N)

    sup_errors, defects = [], []
    for f in prefix:
        qz = quantize_first_min(f, net)
        if not qz.sup_error < eps:
            raise ChainViolation(f"quantization error {qz.sup_error!r} is not below eps={eps!r}")
        pd = projection_defect(f, qz, N, norm)
        sup_errors.append(qz.sup_error)
        defects.append(pd.defect)
    defects = np.asarray(defects)

    projected = prefix.with_values(amb.project(prefix.values, N))
    Dp = pairwise_distances(projected, norm)
    pos, k = _cluster_positions(Dp, np.arange(len(prefix)), eps_prime)

    whole = norm.indicator(space, np.ones(space.atom_count, dtype=bool))
    bound = 2.0 * (1.0 + pn) * eps * whole + eps_prime
    sharp = 2.0 * (1.0 + pn) * max(sup_errors) * whole + eps_prime
    D = pairwise_distances(prefix.take(pos), norm)
    pairs = []
    for a in range(len(pos)):
        for b in range(a + 1, len(pos)):
            i, j = pos[a], pos[b]
            via = defects[i] + defects[j] + Dp[i, j]
            if not (_leq(D[a, b], via) and _leq(Dp[i, j], eps_prime) and _leq(via, sharp)):
                raise ChainViolation(
                    f"lemma chain fails for members {int(prefix.indices[i])}, {int(prefix.indices[j])}"
                )
            pairs.append({"pair": [int(prefix.indices[i]), int(prefix.indices[j])],
                          "distance": float(D[a, b]), "via_projection": float(via)})
    budget = {
        "eps": float(eps), "eps_prime": eps_prime, "N": N, "projection_norm": pn,
        "net_size": len(centers), "net_source": source, "max_sup_error": float(max(sup_errors)),
        "max_defect": float(defects.max()), "sharp_bound": float(sharp),
        "clusters": k, "cover_radius": cover.radius,
    }
    return SubsequenceCertificate(tuple(int(i) for i in prefix.indices[pos]), float(bound),
                                  budget, float(D.max()) if len(pos) > 1 else 0.0, pairs)


def _with_origin(cover):
    zero = np.zeros((1, cover.space.dim))
    return CompactCover(cover.space, np.vstack([cover.centers, zero]), cover.radius)


def theorem1_extract(prefix, p, eps, ui: UICertificate, tight: TightnessCertificate,
                     lemma_eps=None, eps_prime=None):
    """Subsequence pairwise within ``7 * eps`` from UI and tightness certificates.

    Refuses with :class:`CertificateRefused` when a certificate is false on
    the prefix or too weak for ``eps``.  Every step of the inequality chain
    is re-evaluated for each returned pair.
    """
    prefix = as_prefix(prefix)
    norm = as_norm(p)
    eps = float(eps)
    if not eps > 0:
        raise ValueError("eps must be positive")
    r = float(ui.r)
    space, amb = prefix.space, prefix.ambient

    tails = tail_norms(prefix, norm, r)
    if not tails.max() <= ui.bound + VERIFY_TOL:
        raise CertificateRefused("uniform integrability: sup ||1_{||f||>r} f|| <= bound",
                                 f"measured {tails.max():.6g} > claimed {ui.bound:.6g}")
    if not ui.bound < eps:
        raise CertificateRefused("uniform integrability: sup ||1_{||f||>r} f|| < eps",
                                 f"bound {ui.bound:.6g} >= eps {eps:.6g}")
    outside = outside_measures(prefix, tight.cover)
    if not outside.max() <= tight.eps + 1e-12:
        raise CertificateRefused("tightness: sup mu(f not in K) <= certified eps",
                                 f"measured {outside.max():.6g} > claimed {tight.eps:.6g}")
    threshold = norm.tightness_threshold(eps, r)
    if not tight.eps <= threshold:
        raise CertificateRefused("tightness: sup mu(f not in K) <= eps^p / r^p",
                                 f"{tight.eps:.6g} > {threshold:.6g}")

    C = amb.basis_constant
    if lemma_eps is None:
        lemma_eps = eps / (8.0 * (1.0 + C))
    whole = norm.indicator(space, np.ones(space.atom_count, dtype=bool))
    if eps_prime is None:
        eps_prime = eps - 2.0 * (1.0 + C) * lemma_eps * whole
    if not 2.0 * (1.0 + C) * lemma_eps * whole + eps_prime <= eps * (1 + 1e-12):
        raise ValueError("lemma budget exceeds eps: lower lemma_eps or eps_prime")

    K = tight.cover
    restricted = restrict_to_cover(prefix, K)
    lemma = lemma_extract(restricted, _with_origin(K), norm, lemma_eps, eps_prime)
    pos = prefix.positions_of(lemma.indices)
    sub = prefix.take(pos)

    vals = sub.values
    pw = sub.pointwise_norms
    le = pw <= r
    inside = K.contains(vals)

    def piece(mask):
        return sub.with_values(np.where(mask[..., None], vals, 0.0))

    D_full = pairwise_distances(sub, norm)
    D_le = pairwise_distances(piece(le), norm)
    D_le_out = pairwise_distances(piece(le & ~inside), norm)
    D_le_in = pairwise_distances(piece(le & inside), norm)
    D_in = pairwise_distances(piece(inside), norm)
    D_gt_in = pairwise_distances(piece(~le & inside), norm)
    T = tails[pos]
    G = norm.rows(space, np.where(~le & inside, pw, 0.0))
    P_out = norm.rows(space, np.where(le & ~inside, pw, 0.0))
    r_phi = np.array([r * norm.indicator(space, ~inside[k]) for k in range(len(sub))])

    pairs = []
    for a in range(len(sub)):
        for b in range(a + 1, len(sub)):
            l0 = D_full[a, b]
            l1 = T[a] + T[b] + D_le[a, b]
            l2 = T[a] + T[b] + D_le_out[a, b] + D_le_in[a, b]
            l3 = T[a] + T[b] + r_phi[a] + r_phi[b] + D_in[a, b] + D_gt_in[a, b]
            l4 = 6.0 * eps + D_in[a, b]
            steps = {
                "truncation": _leq(l0, l1) and _leq(l1, 2 * eps + D_le[a, b]),
                "split_by_cover": _leq(l1, l2),
                "outside_cover": _leq(D_le_out[a, b], P_out[a] + P_out[b])
                and _leq(P_out[a], r_phi[a]) and _leq(P_out[b], r_phi[b]),
                "inside_cover": _leq(D_le_in[a, b], D_in[a, b] + D_gt_in[a, b])
                and _leq(D_gt_in[a, b], G[a] + G[b]) and _leq(G[a], T[a]) and _leq(G[b], T[b]),
                "six_eps": _leq(l2, l3) and _leq(l3, l4)
                and _leq(r_phi[a], eps) and _leq(r_phi[b], eps),
                "seven_eps": _leq(D_in[a, b], lemma.pairwise_bound) and _leq(l4, 7 * eps),
            }
            failed = [k for k, ok in steps.items() if not ok]
            n, m = int(sub.indices[a]), int(sub.indices[b])
            if failed:
                raise ChainViolation(f"chain step(s) {failed} fail for pair ({n}, {m})")
            pairs.append({
                "pair": [n, m], "distance": float(l0), "after_truncation": float(l1),
                "after_split": float(l2), "after_r_mu": float(l3), "six_eps_line": float(l4),
                "restricted_distance": float(D_in[a, b]),
                "r_mu_terms": [float(r_phi[a]), float(r_phi[b])],
            })
    measured = float(D_full.max()) if len(sub) > 1 else 0.0
    budget = {
        "eps": eps, "r": r, "ui_bound": float(ui.bound), "tightness_eps": float(tight.eps),
        "tightness_threshold": float(threshold), "cover_size": len(K),
        "cover_radius": K.radius, "lemma": lemma.budget,
        "lemma_bound": lemma.pairwise_bound, "basis_constant": C,
    }
    return SubsequenceCertificate(lemma.indices, 7.0 * eps, budget, measured, pairs)
