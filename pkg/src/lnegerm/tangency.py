"""Tangency orders, the arc criterion for LNE, and Lojasiewicz exponents.

Outer orders come from Euclidean distances between distance-parametrized
curves; inner orders from graph geodesics inside per-scale clouds of the
whole set.  Orders are slopes of log-log fits over a geometric scale grid,
cross-checked against the exact series oracle where one exists.  The
pairwise Lojasiewicz exponent is the ratio outer/inner order, so that a
germ is LNE exactly when its exponent is 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DisconnectedError, InputError
from .germs import GermSet, PuiseuxBranch, sample_germ, symbolic_separation_order
from .metrics import build_graph, inner_distance

#: log-log fits are trusted when the RMS residual is below this and the fit
#: spans at least MIN_SCALES scales.
RESIDUAL_GATE = 0.02
MIN_SCALES = 5


class Verdict(str, enum.Enum):
    LNE = "LNE"
    NOT_LNE = "NOT_LNE"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class OrderEstimate:
    """Power-law fit f(t) ~ a t^slope; intercept = log a."""

    slope: float
    intercept: float
    residual: float
    scales_used: tuple
    confident: bool

    @property
    def leading_constant(self) -> float:
        return math.exp(self.intercept)

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "scales_used": list(self.scales_used),
            "confident": self.confident,
        }


def _check_geometric(scales) -> None:
    t = np.asarray(scales, dtype=float)
    if len(t) < MIN_SCALES:
        raise InputError(f"need at least {MIN_SCALES} scales, got {len(t)}")
    ratios = t[1:] / t[:-1]
    if np.any(ratios >= 1):
        raise InputError("scales must be strictly decreasing")
    if np.max(ratios) - np.min(ratios) > 1e-6:
        raise InputError("scales must form a geometric sequence")


def estimate_order(samples) -> OrderEstimate:
    """Least-squares log-log fit of positive values over geometric scales."""
    samples = [(float(t), float(f)) for t, f in samples]
    scales = [t for t, _ in samples]
    _check_geometric(scales)
    values = np.array([f for _, f in samples])
    if np.any(values <= 0):
        raise InputError("order undefined: nonpositive sample value")
    lt = np.log(np.asarray(scales))
    lf = np.log(values)
    slope, intercept = np.polyfit(lt, lf, 1)
    resid = float(np.sqrt(np.mean((lf - (slope * lt + intercept)) ** 2)))
    confident = resid <= RESIDUAL_GATE and len(scales) >= MIN_SCALES
    return OrderEstimate(float(slope), float(intercept), resid, tuple(scales), confident)


def outer_tangency_order(b1, b2, scales):
    """(fit, exact) outer order of tangency between two curve pieces.

    The exact rational value is attached when both pieces are Puiseux
    branches and the series oracle decides; ``exact`` is None otherwise.
    """
    scales = [float(t) for t in scales]
    p1 = np.array([b1.point_at_radius(t) for t in scales])
    p2 = np.array([b2.point_at_radius(t) for t in scales])
    d = np.linalg.norm(p1 - p2, axis=1)
    exact = None
    infinite = False
    if isinstance(b1, PuiseuxBranch) and isinstance(b2, PuiseuxBranch):
        sep = symbolic_separation_order(b1, b2)
        infinite = sep.infinite
        exact = sep.order
    if np.any(d <= 0) or (infinite and np.max(d) < 1e-12):
        raise InputError(
            f"pieces {b1.label!r} and {b2.label!r} are numerically indistinguishable"
        )
    return estimate_order(list(zip(scales, d))), exact


def inner_tangency_order(
    set_: GermSet, b1, b2, scales, density: int, radius_factor: float = 4.0
) -> OrderEstimate:
    """Inner order via graph geodesics between the distance-parametrized
    points of the two pieces, inside the per-scale cloud of the whole set."""
    clouds = sample_germ(set_, scales, density)
    samples = []
    for t, cloud in zip(scales, clouds):
        graph = build_graph(cloud, radius_factor * cloud.spacing)
        i = cloud.tip_index[b1.label]
        j = cloud.tip_index[b2.label]
        d = inner_distance(graph, i, j)
        if math.isinf(d):
            raise DisconnectedError(
                f"pieces {b1.label!r}, {b2.label!r} disconnected at scale {t}",
                scale=t,
            )
        samples.append((t, d))
    return estimate_order(samples)


@dataclass(frozen=True)
class TangencyReport:
    pair: tuple
    tord: OrderEstimate
    tord_exact: Fraction | None
    tord_inn: OrderEstimate
    verdict: Verdict
    lojasiewicz_pair: float

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "tord": self.tord.to_dict(),
            "tord_exact": (
                [self.tord_exact.numerator, self.tord_exact.denominator]
                if self.tord_exact is not None
                else None
            ),
            "tord_inn": self.tord_inn.to_dict(),
            "verdict": self.verdict.value,
            "lojasiewicz_pair": self.lojasiewicz_pair,
        }


def pair_verdict(
    set_: GermSet,
    b1,
    b2,
    scales,
    density: int,
    order_tolerance: float = 0.1,
    radius_factor: float = 4.0,
) -> TangencyReport:
    """Arc-criterion verdict for one pair: LNE iff outer and inner orders
    agree within the tolerance, with the outer/inner ratio as the pairwise
    Lojasiewicz exponent."""
    tord, exact = outer_tangency_order(b1, b2, scales)
    tord_inn = inner_tangency_order(set_, b1, b2, scales, density, radius_factor)
    l_pair = tord.slope / tord_inn.slope
    if not (tord.confident and tord_inn.confident):
        verdict = Verdict.UNDECIDED
    elif abs(tord.slope - tord_inn.slope) <= order_tolerance:
        verdict = Verdict.LNE
    else:
        verdict = Verdict.NOT_LNE
    return TangencyReport((b1.label, b2.label), tord, exact, tord_inn, verdict, l_pair)


@dataclass(frozen=True)
class LojasiewiczResult:
    value: float
    witness: tuple | None
    lower_bound_only: bool
    reports: tuple

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": list(self.witness) if self.witness else None,
            "lower_bound_only": self.lower_bound_only,
            "reports": [r.to_dict() for r in self.reports],
        }


def lojasiewicz_germ(
    set_: GermSet,
    scales,
    density: int,
    order_tolerance: float = 0.1,
    radius_factor: float = 4.0,
) -> LojasiewiczResult:
    """Maximum pairwise exponent over the branch pairs of the germ.

    A single-branch set is normally embedded with exponent 1.  Any
    undecided pair downgrades the result to a lower bound.
    """
    branches = set_.branches
    if len(branches) == 0:
        raise InputError("germ set has no curve pieces")
    if len(branches) == 1:
        return LojasiewiczResult(1.0, None, False, ())
    reports = []
    for i in range(len(branches)):
        for j in range(i + 1, len(branches)):
            reports.append(
                pair_verdict(
                    set_,
                    branches[i],
                    branches[j],
                    scales,
                    density,
                    order_tolerance,
                    radius_factor,
                )
            )
    lower_bound = any(r.verdict is Verdict.UNDECIDED for r in reports)
    decided = [r for r in reports if r.verdict is not Verdict.UNDECIDED] or reports
    best = max(decided, key=lambda r: r.lojasiewicz_pair)
    return LojasiewiczResult(
        best.lojasiewicz_pair, best.pair, lower_bound, tuple(reports)
    )
