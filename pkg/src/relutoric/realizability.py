"""Deciding shallow realizability of homogeneous piecewise linear functions.

A homogeneous CPWL function is computable by an unbiased one-hidden-layer
rational network iff, after extending its bend locus to full central
hyperplanes, the wall bends are constant along each hyperplane.  The check
is exact; on success, explicit integer first-layer rows and rational output
weights are synthesized (one neuron per bend hyperplane, function recovered
up to an explicit linear correction).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CriterionFailed, RelutoricError
from .exact_math import IntVec, RatVec, vsub
from .fan import (
    EXTENDED,
    Fan,
    Hyperplane,
    augmented_central_fan,
    cone_containing,
)
from .divisor import (
    SupportFunction,
    intersection_number,
    support_of_network,
)
from .network import NetworkSpec, ValidatedNetwork, validate


@dataclass(frozen=True)
class HyperplaneGroup:
    """All walls inside one extended hyperplane, with their bends."""

    normal: IntVec
    walls: tuple[tuple[IntVec, ...], ...]
    numbers: tuple[Fraction, ...]

    @property
    def passes(self) -> bool:
        return len(set(self.numbers)) <= 1


@dataclass(frozen=True)
class Synthesis:
    """Shallow network plus the linear correction g with f = f_net + g."""

    network: ValidatedNetwork
    correction_slope: RatVec


@dataclass(frozen=True)
class RealizabilityReport:
    realizable: bool
    groups: tuple[HyperplaneGroup, ...]
    witness: HyperplaneGroup | None = None
    synthesis: Synthesis | None = None


def as_support(obj) -> SupportFunction:
    """Accept a SupportFunction or a ValidatedNetwork."""
    if isinstance(obj, SupportFunction):
        return obj
    if isinstance(obj, ValidatedNetwork):
        return support_of_network(obj)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a CPWL input")


def transfer_support(s: SupportFunction, fan: Fan) -> SupportFunction:
    """Re-express s on a fan that refines it (up to zero-bend walls): every
    maximal cone of `fan` meets the interior of cones of s.fan sharing one
    slope, so an interior probe determines it."""
    slopes = []
    for cone in fan.maximal_cones:
        probe = cone.interior_point()
        slopes.append(s.slopes[cone_containing(s.fan, probe)])
    return SupportFunction(fan, tuple(slopes))


def nonlinear_locus_hyperplanes(s: SupportFunction) -> tuple[Hyperplane, ...]:
    """Span hyperplanes of the walls where the function actually bends,
    ordered by sign-canonical normal."""
    normals = []
    for wall in s.fan.walls:
        if intersection_number(s, wall) != 0 and wall.normal not in normals:
            normals.append(wall.normal)
    return tuple(Hyperplane(n, EXTENDED) for n in sorted(normals))


def criterion_fan(s: SupportFunction) -> tuple[Fan, SupportFunction]:
    """Central fan of the extended bend hyperplanes (synthetically augmented
    when rank-deficient) carrying the transferred slopes."""
    extended = nonlinear_locus_hyperplanes(s)
    fan = augmented_central_fan(extended, s.fan.dim)
    return fan, transfer_support(s, fan)


def criterion_check(cpwl) -> RealizabilityReport:
    """Wall-number criterion: realizable iff every extended hyperplane sees
    one single bend value across all of its walls.  Synthetic augmentation
    walls carry zero bend and are excluded from the groups."""
    s = as_support(cpwl)
    fan, refined = criterion_fan(s)
    extended_normals = {h.normal for h in fan.hyperplanes if h.kind == EXTENDED}
    grouped: dict[IntVec, list[int]] = {n: [] for n in sorted(extended_normals)}
    for i, wall in enumerate(fan.walls):
        if wall.normal in grouped:
            grouped[wall.normal].append(i)
    groups = []
    witness = None
    for normal, indices in sorted(grouped.items()):
        walls = tuple(fan.walls[i].generators for i in indices)
        numbers = tuple(intersection_number(refined, fan.walls[i]) for i in indices)
        group = HyperplaneGroup(normal, walls, numbers)
        groups.append(group)
        if witness is None and not group.passes:
            witness = group
    return RealizabilityReport(witness is None, tuple(groups), witness)


def synthesize_shallow(cpwl, report: RealizabilityReport | None = None) -> ValidatedNetwork:
    """Explicit shallow network from a passing criterion report: first-layer
    rows are the sign-canonical hyperplane normals, output weights are the
    negated common wall numbers."""
    s = as_support(cpwl)
    if report is None:
        report = criterion_check(s)
    if not report.realizable:
        raise CriterionFailed(
            f"hyperplane {report.witness.normal} has unequal wall numbers "
            f"{sorted(set(report.witness.numbers))}")
    dim = s.fan.dim
    if not report.groups:
        # No bends at all: the function is linear, computed by the empty
        # hidden layer up to the linear correction.
        return validate(NetworkSpec((dim, 0, 1), ((), ((),))))
    rows = []
    weights = []
    for group in report.groups:
        rows.append(tuple(Fraction(x) for x in group.normal))
        weights.append(-group.numbers[0])
    spec = NetworkSpec((dim, len(rows), 1), (tuple(rows), (tuple(weights),)))
    return validate(spec)


def common_refinement(supports) -> list[SupportFunction]:
    """Transfer several supports onto the central fan of the union of all
    their wall hyperplanes (augmented if necessary)."""
    normals = []
    dim = supports[0].fan.dim
    for s in supports:
        for wall in s.fan.walls:
            if wall.normal not in normals:
                normals.append(wall.normal)
    fan = augmented_central_fan(
        tuple(Hyperplane(n, EXTENDED) for n in normals), dim)
    return [transfer_support(s, fan) for s in supports]


def verify_up_to_linear(cpwl, net: ValidatedNetwork) -> tuple[bool, RatVec]:
    """Exact comparison of a function and a network modulo linear terms.

    Fits g as the slope difference on one maximal cone of a common
    refinement, then asserts the same difference on every other cone.
    """
    f = as_support(cpwl)
    g_support = support_of_network(net)
    rf, rn = common_refinement([f, g_support])
    correction = vsub(rf.slopes[0], rn.slopes[0])
    equal = all(vsub(a, b) == correction
                for a, b in zip(rf.slopes, rn.slopes))
    return equal, correction


def analyze(cpwl) -> RealizabilityReport:
    """criterion_check plus synthesis and verification when realizable."""
    s = as_support(cpwl)
    report = criterion_check(s)
    if not report.realizable:
        return report
    net = synthesize_shallow(s, report)
    ok, correction = verify_up_to_linear(s, net)
    if not ok:
        raise RelutoricError(
            "synthesized network disagrees beyond a linear term")
    return RealizabilityReport(True, report.groups, None,
                               Synthesis(net, correction))
