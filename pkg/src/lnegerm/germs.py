"""Curve and surface germs at the origin.

Curve germs are finite Puiseux sums with exact rational exponents and float
coefficient vectors.  Surface germs are procedural samplers (see
``surfaces``).  This module owns evaluation, distance reparametrization,
tangent half-lines, the exact separation-order oracle, sampling into point
clouds, and the germ JSON file format.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .errors import DomainError, InputError, ReparametrizationError, UndecidableOrderError
from .metrics import PointCloud
from .norms import EUCLID
from .series import Series, invert_norm_series

#: |p_k| must match the target radius to this relative tolerance.
REPARAM_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class HalfLine:
    """Half-line R+ * direction, direction a unit vector."""

    direction: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        n = np.linalg.norm(d)
        if not math.isclose(n, 1.0, rel_tol=1e-9):
            raise InputError("half-line direction must be a unit vector")

    def angle_to(self, other: "HalfLine") -> float:
        c = float(np.clip(np.dot(self.direction, other.direction), -1.0, 1.0))
        return math.acos(c)


@dataclass(frozen=True, eq=False)
class PuiseuxBranch:
    """gamma(s) = sum_i coeff_i * s**exp_i on [0, t_max].

    Exponents are strictly increasing positive rationals; coefficient
    vectors are nonzero.  The leading exponent being positive forces
    gamma(0) = 0.
    """

    terms: tuple  # ((Fraction, np.ndarray), ...)
    ambient_dim: int
    t_max: float
    label: str

    def __post_init__(self):
        if not self.terms:
            raise InputError(f"branch {self.label!r} has no terms")
        prev = Fraction(0)
        for exp, coeff in self.terms:
            if exp <= prev:
                raise InputError(
                    f"branch {self.label!r}: exponents must be strictly "
                    "increasing and positive"
                )
            prev = exp
            c = np.asarray(coeff, dtype=float)
            if c.shape != (self.ambient_dim,):
                raise InputError(f"branch {self.label!r}: coefficient dimension mismatch")
            if not np.any(c):
                raise InputError(f"branch {self.label!r}: zero coefficient vector")
        if self.t_max <= 0:
            raise InputError(f"branch {self.label!r}: t_max must be positive")

    # -- evaluation ----------------------------------------------------

    def eval(self, t):
        """gamma(t) for scalar or array t in [0, t_max]."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.t_max * (1 + 1e-12)):
            raise DomainError(f"branch {self.label!r}: parameter outside [0, {self.t_max}]")
        out = np.zeros(t.shape + (self.ambient_dim,))
        for exp, coeff in self.terms:
            out += np.power(t, float(exp))[..., None] * np.asarray(coeff, dtype=float)
        return out

    def norm_at(self, s, norm=EUCLID):
        return norm(self.eval(s))

    def eval_deriv(self, t):
        """gamma'(t) for t > 0 (fractional exponents blow up at 0)."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + (self.ambient_dim,))
        for exp, coeff in self.terms:
            e = float(exp)
            out += e * np.power(t, e - 1.0)[..., None] * np.asarray(coeff, dtype=float)
        return out

    def eval_deriv2(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + (self.ambient_dim,))
        for exp, coeff in self.terms:
            e = float(exp)
            out += e * (e - 1.0) * np.power(t, e - 2.0)[..., None] * np.asarray(
                coeff, dtype=float
            )
        return out

    @property
    def max_radius(self) -> float:
        return float(np.linalg.norm(self.eval(self.t_max)))

    def param_at_radius(self, r: float, norm=EUCLID) -> float:
        """Solve ||gamma(s)||_norm = r on the monotone initial range."""
        if r < 0:
            raise DomainError("radius must be nonnegative")
        if r == 0:
            return 0.0
        exp0, c0 = self.terms[0]
        lead = float(norm(np.asarray(c0, dtype=float)))
        hi = min(self.t_max, (r / lead) ** (1.0 / float(exp0)))
        while self.norm_at(hi, norm) < r:
            if hi >= self.t_max:
                raise DomainError(
                    f"branch {self.label!r}: radius {r} not reached within t_max"
                )
            hi = min(hi * 1.5, self.t_max)
        return float(
            brentq(
                lambda s: self.norm_at(s, norm) - r,
                0.0,
                hi,
                xtol=1e-14 * hi,
                rtol=8.9e-16,
            )
        )

    def point_at_radius(self, r: float, norm=EUCLID) -> np.ndarray:
        return self.eval(self.param_at_radius(r, norm))

    # -- series-level structure ---------------------------------------

    def tangent(self) -> HalfLine:
        _, c0 = self.terms[0]
        c0 = np.asarray(c0, dtype=float)
        return HalfLine(c0 / np.linalg.norm(c0))

    def component_series(self, cap) -> list:
        """Per-coordinate scalar series, truncated at exponent ``cap``."""
        out = []
        for k in range(self.ambient_dim):
            coeffs = {exp: float(coeff[k]) for exp, coeff in self.terms}
            out.append(Series(coeffs, cap))
        return out

    def max_exponent(self) -> Fraction:
        return self.terms[-1][0]


def puiseux_branch(terms, t_max: float, label: str, ambient_dim: int | None = None) -> PuiseuxBranch:
    """Build a branch from (exponent, coefficient-vector) pairs.

    Exponents may be ints, Fractions, or (num, den) pairs; zero coefficient
    vectors are rejected, duplicate exponents are not merged.
    """
    norm_terms = []
    for exp, coeff in terms:
        if isinstance(exp, tuple):
            exp = Fraction(exp[0], exp[1])
        else:
            exp = Fraction(exp)
        c = np.asarray(coeff, dtype=float)
        norm_terms.append((exp, c))
    norm_terms.sort(key=lambda tc: tc[0])
    if ambient_dim is None:
        ambient_dim = len(norm_terms[0][1])
    return PuiseuxBranch(tuple(norm_terms), ambient_dim, float(t_max), label)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def eval_branch(branch: PuiseuxBranch, t: float) -> np.ndarray:
    return branch.eval(t)


def tangent_halfline(branch: PuiseuxBranch) -> HalfLine:
    return branch.tangent()


def reparametrize_by_distance(branch: PuiseuxBranch, scales) -> np.ndarray:
    """Points p_k on the branch with ||p_k|| = t_k.

    The norm is checked to be strictly increasing on the probed parameter
    range; each radius is then solved by bracketed root finding.
    """
    scales = [float(t) for t in scales]
    if any(t <= 0 for t in scales):
        raise DomainError("target radii must be positive")
    params = [branch.param_at_radius(t) for t in scales]
    s_hi = max(params) * 1.05
    probe = np.linspace(0.0, min(s_hi, branch.t_max), 65)
    norms = branch.norm_at(probe)
    if np.any(np.diff(norms) <= 0):
        raise ReparametrizationError(
            f"branch {branch.label!r}: norm not strictly increasing on probed range"
        )
    pts = branch.eval(np.asarray(params))
    radii = np.linalg.norm(pts, axis=1)
    if np.any(np.abs(radii - np.asarray(scales)) > REPARAM_RTOL * np.asarray(scales)):
        raise ReparametrizationError(
            f"branch {branch.label!r}: radius solve did not converge"
        )
    return pts


@dataclass(frozen=True)
class SeparationOrder:
    """Exact order of ||g1~(t) - g2~(t)|| for distance-aligned branches.

    ``infinite`` means the truncated series coincide below
    ``undecided_beyond``; it flags truncation-level agreement, not equality
    of the underlying germs.
    """

    order: Fraction | None
    infinite: bool
    undecided_beyond: Fraction | None = None


def symbolic_separation_order(b1: PuiseuxBranch, b2: PuiseuxBranch) -> SeparationOrder:
    """Exact rational separation order of two branches, or INFINITE.

    Both branches are aligned to the distance parametrization symbolically
    (norm series inverted to a few correction terms) and subtracted; the
    result is the smallest exponent at which the aligned series differ.
    """
    if b1.ambient_dim != b2.ambient_dim:
        raise InputError("branches must share an ambient dimension")
    cap = 3 * max(b1.max_exponent(), b2.max_exponent()) + 6
    aligned = []
    for b in (b1, b2):
        comps = b.component_series(cap)
        nsq = Series.zero(cap)
        for c in comps:
            nsq = nsq + c * c
        s_of_t = invert_norm_series(nsq.pow_rational(Fraction(1, 2)))
        aligned.append([c.substitute(s_of_t) for c in comps])
    ref = max(
        max(c.max_abs_coeff() for c in aligned[0]),
        max(c.max_abs_coeff() for c in aligned[1]),
    )
    best = None
    trunc = math.inf
    for c1, c2 in zip(aligned[0], aligned[1]):
        diff = c1 - c2
        trunc = min(trunc, diff.trunc)
        ld = diff.lead(ref_scale=ref)
        if ld is not None and (best is None or ld[0] < best):
            best = ld[0]
    if best is None:
        return SeparationOrder(None, True, undecided_beyond=Fraction(trunc))
    if best >= trunc:
        raise UndecidableOrderError(
            "separation order lies beyond the series truncation", bound=Fraction(trunc)
        )
    return SeparationOrder(Fraction(best), False, None)


# ---------------------------------------------------------------------------
# Germ sets and sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GermSet:
    """Named union of curve pieces and procedural surface pieces at 0.

    ``branches`` may hold any objects with the curve-piece interface
    (``label``, ``point_at_radius``, ``max_radius``); exact Puiseux branches
    additionally support the series-level oracles.
    """

    branches: tuple
    surfaces: tuple
    ambient_dim: int
    label: str

    def __post_init__(self):
        labels = [p.label for p in self.branches] + [p.label for p in self.surfaces]
        if len(set(labels)) != len(labels):
            raise InputError(f"germ set {self.label!r}: piece labels must be unique")
        if not labels:
            raise InputError(f"germ set {self.label!r}: no pieces")

    def branch(self, label: str):
        for b in self.branches:
            if b.label == label:
                return b
        raise InputError(f"no branch labelled {label!r} in germ set {self.label!r}")

    @property
    def pieces(self):
        return self.branches + self.surfaces


def germ_set(branches=(), surfaces=(), label="germ", ambient_dim=None) -> GermSet:
    branches = tuple(branches)
    surfaces = tuple(surfaces)
    if ambient_dim is None:
        if branches:
            ambient_dim = branches[0].ambient_dim
        elif surfaces:
            ambient_dim = surfaces[0].ambient_dim
        else:
            raise InputError("empty germ set")
    for p in branches + surfaces:
        if p.ambient_dim != ambient_dim:
            raise InputError(f"piece {p.label!r} has inconsistent ambient dimension")
    return GermSet(branches, surfaces, ambient_dim, label)


def _sample_curve_piece(piece, scale: float, density: int, strict: bool = True):
    """Points of a curve piece at radii covering [0, scale].

    Returns (params, points); params are the piece's natural parameters
    (the Puiseux parameter for exact branches, the radius otherwise).
    With ``strict=False`` a piece shorter than the scale is sampled up to
    its own extent instead of raising.
    """
    top = scale
    if getattr(piece, "max_radius", math.inf) < scale * (1 - 1e-9):
        if strict:
            raise DomainError(f"piece {piece.label!r} does not reach radius {scale}")
        top = piece.max_radius
    m = max(int(math.ceil(1.25 * density)), 8)
    for _ in range(6):
        radii = np.linspace(0.0, top, m + 1)
        if isinstance(piece, PuiseuxBranch):
            params = [piece.param_at_radius(r) for r in radii]
            pts = piece.eval(np.asarray(params))
        else:
            params = list(radii)
            pts = np.array([piece.point_at_radius(r) for r in radii])
        chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if np.max(chords) <= scale / density:
            return params, pts
        m *= 2
    raise ReparametrizationError(
        f"piece {piece.label!r}: could not meet the spacing bound at scale {scale}"
    )


def sample_cloud(
    set_: GermSet, scale: float, density: int, strict: bool = True
) -> PointCloud:
    """One point cloud covering {x in X : ||x|| <= scale}.

    Curve pieces are sampled by the distance parametrization (the radius-
    ``scale`` point is recorded in ``tip_index``); surface pieces by their
    samplers.  Coincident points across pieces are merged with the union of
    their labels — these shared points are the only junctions the
    neighborhood graph will see.
    """
    if density < 8:
        raise InputError("density must be at least 8")
    pts_list, labels, params = [], [], []
    tips = {}
    for piece in set_.branches:
        piece_params, pts = _sample_curve_piece(piece, scale, density, strict)
        for s, p in zip(piece_params, pts):
            pts_list.append(p)
            labels.append({piece.label})
            params.append({piece.label: s})
        if np.linalg.norm(pts[-1]) >= scale * (1 - 1e-9):
            tips[piece.label] = len(pts_list) - 1
    for piece in set_.surfaces:
        try:
            spts, sparams = piece.sample(scale, density)
        except Exception as exc:  # propagate with the piece label attached
            raise InputError(f"sampler for piece {piece.label!r} failed: {exc}") from exc
        for p, prm in zip(spts, sparams):
            pts_list.append(np.asarray(p, dtype=float))
            labels.append({piece.label})
            params.append({piece.label: prm})
    new_pts, new_labels, new_params, remap = merge_coincident(
        np.array(pts_list), labels, params, tol=1e-9 * scale
    )
    tip_index = {lab: remap[i] for lab, i in tips.items()}
    return PointCloud(
        points=new_pts,
        scale=scale * (1 + 1e-12),
        labels=new_labels,
        params=new_params,
        spacing=scale / density,
        tip_index=tip_index,
    )


def merge_coincident(pts: np.ndarray, labels, params, tol: float):
    """Union-merge points closer than ``tol``, unioning labels and params.

    Returns (points, labels, params, remap) with ``remap`` mapping old to
    new indices.  Shared seam/junction points across pieces become single
    multi-label points this way.
    """
    labels = [set(l) for l in labels]
    params = [dict(p) for p in params]
    tree = cKDTree(pts)
    pairs = tree.query_pairs(r=tol, output_type="ndarray")
    parent = np.arange(len(pts))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri
    for i in range(len(pts)):
        r = find(i)
        if i != r:
            labels[r] |= labels[i]
            params[r].update(params[i])
    keep, root_to_new = [], {}
    for i in range(len(pts)):
        r = find(i)
        if r not in root_to_new:
            root_to_new[r] = len(keep)
            keep.append(r)
    remap = np.array([root_to_new[find(i)] for i in range(len(pts))])
    return (
        pts[keep],
        tuple(frozenset(labels[r]) for r in keep),
        tuple(params[r] for r in keep),
        remap,
    )


def sample_germ(set_: GermSet, scales, density: int) -> list:
    """Per-scale clouds for a decreasing geometric scale sequence."""
    scales = [float(t) for t in scales]
    if len(scales) >= 2:
        ratios = np.array(scales[1:]) / np.array(scales[:-1])
        if np.any(ratios >= 1):
            raise InputError("scales must be strictly decreasing")
        if np.max(ratios) - np.min(ratios) > 1e-6:
            raise InputError("scales must form a geometric sequence")
    return [sample_cloud(set_, t, density) for t in scales]


# ---------------------------------------------------------------------------
# Germ JSON files
# ---------------------------------------------------------------------------


def germset_to_json(set_: GermSet) -> dict:
    branches = []
    for b in set_.branches:
        if not isinstance(b, PuiseuxBranch):
            raise InputError("only exact Puiseux branches can be serialized")
        branches.append(
            {
                "label": b.label,
                "t_max": b.t_max,
                "terms": [
                    {
                        "exp": [t.numerator, t.denominator],
                        "coeff": [float(c) for c in coeff],
                    }
                    for t, coeff in b.terms
                ],
            }
        )
    surfaces = [p.to_json() for p in set_.surfaces]
    return {
        "label": set_.label,
        "ambient_dim": set_.ambient_dim,
        "branches": branches,
        "surfaces": surfaces,
    }


def germset_from_json(data: dict) -> GermSet:
    from .surfaces import surface_from_json  # local import; surfaces builds on germs

    try:
        dim = int(data["ambient_dim"])
        label = str(data["label"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"germ file: missing or malformed field ({exc})") from exc
    branches = []
    for i, b in enumerate(data.get("branches", [])):
        try:
            terms = []
            for t in b["terms"]:
                exp = t["exp"]
                if (
                    not isinstance(exp, list)
                    or len(exp) != 2
                    or not all(isinstance(e, int) for e in exp)
                ):
                    raise InputError(
                        f"germ file: branch {i}: exponents must be exact [num, den] integer pairs"
                    )
                terms.append(((exp[0], exp[1]), t["coeff"]))
            branches.append(
                puiseux_branch(terms, b["t_max"], b["label"], ambient_dim=dim)
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"germ file: branch {i}: {exc}") from exc
    surfaces = [surface_from_json(s, dim) for s in data.get("surfaces", [])]
    return germ_set(branches, surfaces, label=label, ambient_dim=dim)


def load_germ_file(path) -> GermSet:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"germ file {path}: {exc}") from exc
    return germset_from_json(data)
