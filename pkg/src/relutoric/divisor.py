"""Toric divisors on ReLU fans: slope data, intersection numbers, polytopes.

A support function is the pair (fan, one rational slope covector per maximal
cone); it encodes a continuous piecewise linear function that is linear on
every cone.  Divisors are rational coefficient vectors indexed by fan rays.
The two views are linked by the Cartier relation <m_sigma, u_rho> = -a_rho,
and the bend of the support function across a wall is the intersection
number of the divisor with the wall's invariant curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import (
    ContinuityViolation,
    InconsistentRayValue,
    NotConvexFunction,
    NotLatticePolytope,
    NotQCartier,
    RankDeficient,
    SingularSample,
)
from .exact_math import (
    IntVec,
    RationalPolytope,
    RatVec,
    convex_hull,
    frac,
    kernel_normal,
    lattice_point_count,
    mat_rank,
    mixed_volume,
    pairing_one_solution,
    ratvec,
    solve_exact,
    vadd,
    vdot,
    vneg,
    vscale,
    vsub,
)
from .fan import Fan, Wall, cone_containing
from .network import ValidatedNetwork, evaluate


@dataclass(frozen=True)
class SupportFunction:
    """A fan together with one slope covector per maximal cone."""

    fan: Fan
    slopes: tuple[RatVec, ...]

    def value(self, x) -> Fraction:
        x = ratvec(x)
        return frac(vdot(self.slopes[cone_containing(self.fan, x)], x))

    def clearing_multiple(self) -> int:
        """Minimal positive integer l with all slopes of l*s integral."""
        mult = 1
        for m in self.slopes:
            for c in m:
                mult = lcm(mult, c.denominator)
        return mult


@dataclass(frozen=True)
class ToricDivisor:
    """Rational coefficient a_rho per fan ray (a Q-Cartier Weil divisor
    candidate; Q-Cartierness is only decided when slopes are requested)."""

    fan: Fan
    coefficients: tuple[Fraction, ...]


@dataclass(frozen=True)
class WallCurve:
    """The invariant curve of a wall: quotient direction and lattice lift.

    `quotient_normal` is the primitive covector cutting out the wall span,
    oriented nonnegative on the higher-indexed incident cone; `lift` is a
    lattice point of that cone pairing to 1 with it.
    """

    wall: Wall
    quotient_normal: IntVec
    lift: IntVec


@dataclass(frozen=True)
class ConvexityReport:
    convex: bool
    strictly_convex: bool
    concave: bool
    strictly_concave: bool


def support_on_fan(fan: Fan, slopes) -> SupportFunction:
    """Attach slope data to a fan, verifying continuity across every wall."""
    slopes = tuple(ratvec(m) for m in slopes)
    if len(slopes) != len(fan.maximal_cones):
        raise ContinuityViolation(
            f"{len(slopes)} slopes for {len(fan.maximal_cones)} cones")
    s = SupportFunction(fan, slopes)
    _check_continuity(s)
    return s


def _check_continuity(s: SupportFunction) -> None:
    for wall in s.fan.walls:
        i, j = wall.cones
        diff = vsub(s.slopes[i], s.slopes[j])
        for w in wall.generators:
            if vdot(diff, w) != 0:
                raise ContinuityViolation(
                    f"slopes disagree on wall {wall.generators}")


def slopes_by_evaluation(fan: Fan, func) -> SupportFunction:
    """Slope covector of a cone-linear function on each maximal cone.

    Samples interior rational points (ray sum perturbed by each ray in turn)
    in general position, solves the linear system, and verifies continuity.
    """
    slopes = []
    for cone in fan.maximal_cones:
        center = cone.interior_point()
        points = []
        for scale in (1, 2, 3):
            for r in cone.rays:
                cand = vadd(vscale(scale, center), r)
                if mat_rank(points + [cand]) > len(points):
                    points.append(cand)
                if len(points) == fan.dim:
                    break
            if len(points) == fan.dim:
                break
        if len(points) < fan.dim:
            raise SingularSample(
                f"could not find {fan.dim} independent interior points")
        values = [func(p) for p in points]
        try:
            m = solve_exact(points, values)
        except RankDeficient as exc:
            raise SingularSample(str(exc)) from exc
        slopes.append(m)
    s = SupportFunction(fan, tuple(slopes))
    _check_continuity(s)
    return s


def extract_support(net: ValidatedNetwork, fan: Fan) -> SupportFunction:
    """Slope data of the network on its ReLU fan, by exact evaluation."""
    return slopes_by_evaluation(fan, lambda p: evaluate(net, p))


def support_of_network(net: ValidatedNetwork) -> SupportFunction:
    from .fan import build_relu_fan

    return extract_support(net, build_relu_fan(net))


# ---------------------------------------------------------------------------
# divisors and Cartier data
# ---------------------------------------------------------------------------

def divisor_coefficients(s: SupportFunction) -> ToricDivisor:
    """Ray coefficients a_rho = -<m_sigma, u_rho>, checked to be independent
    of the choice of incident maximal cone."""
    coefficients = []
    for ray in s.fan.rays:
        values = {
            frac(-vdot(s.slopes[i], ray))
            for i, cone in enumerate(s.fan.maximal_cones)
            if ray in cone.rays
        }
        if len(values) != 1:
            raise InconsistentRayValue(
                f"ray {ray} receives {sorted(values)}; continuity breach")
        coefficients.append(values.pop())
    return ToricDivisor(s.fan, tuple(coefficients))


def support_from_divisor(D: ToricDivisor) -> SupportFunction:
    """Solve the Cartier relations cone by cone; fails iff D is not
    Q-Cartier on some cone."""
    slopes = []
    for idx, cone in enumerate(D.fan.maximal_cones):
        rows = list(cone.rays)
        rhs = [-D.coefficients[D.fan.rays.index(r)] for r in rows]
        solution = solve_exact(rows, rhs)
        if solution is None:
            raise NotQCartier(idx)
        slopes.append(solution)
    return SupportFunction(D.fan, tuple(slopes))


def scale_support(s: SupportFunction, factor) -> SupportFunction:
    factor = frac(factor)
    return SupportFunction(s.fan, tuple(vscale(factor, m) for m in s.slopes))


def negate_support(s: SupportFunction) -> SupportFunction:
    return scale_support(s, -1)


def add_supports(a: SupportFunction, b: SupportFunction) -> SupportFunction:
    if a.fan is not b.fan and a.fan != b.fan:
        raise ContinuityViolation("supports live on different fans")
    return SupportFunction(a.fan, tuple(vadd(x, y) for x, y in zip(a.slopes, b.slopes)))


def scale_divisor(D: ToricDivisor, factor) -> ToricDivisor:
    factor = frac(factor)
    return ToricDivisor(D.fan, tuple(factor * a for a in D.coefficients))


def add_divisors(D: ToricDivisor, E: ToricDivisor) -> ToricDivisor:
    if D.fan is not E.fan and D.fan != E.fan:
        raise ContinuityViolation("divisors live on different fans")
    return ToricDivisor(D.fan, tuple(a + b for a, b in zip(D.coefficients, E.coefficients)))


# ---------------------------------------------------------------------------
# intersection numbers
# ---------------------------------------------------------------------------

def wall_curve(fan: Fan, wall: Wall) -> WallCurve:
    """Quotient normal and lattice lift for a wall's invariant curve.

    The primitive normal of the wall span is oriented to be nonnegative on
    the higher-indexed incident cone sigma'; the lift u solves <phi, u> = 1
    and is pushed into sigma' along the wall's interior direction, so u maps
    to the minimal generator of the quotient image of sigma'.
    """
    second = fan.maximal_cones[wall.cones[1]]
    phi = kernel_normal(wall.generators, fan.dim)
    outside = next(r for r in second.rays if r not in wall.generators)
    if vdot(phi, outside) < 0:
        phi = vneg(phi)
    u = pairing_one_solution(phi)
    interior = tuple(sum(g[i] for g in wall.generators)
                     for i in range(fan.dim))
    steps = 0
    for n in second.halfspaces:
        value = vdot(n, u)
        if value >= 0:
            continue
        # Only the wall facet pairs to zero with the wall interior, and u
        # already satisfies it; every other facet sees the interior strictly.
        slope = vdot(n, interior)
        if slope <= 0:
            raise ContinuityViolation("wall interior is not interior to its span")
        steps = max(steps, (-value + slope - 1) // slope)
    if steps:
        u = vadd(u, vscale(steps, interior))
    return WallCurve(wall, phi, tuple(int(x) for x in u))


def intersection_number(s: SupportFunction, wall: Wall,
                        curve: WallCurve | None = None) -> Fraction:
    """Bend of the support function across a wall: <m_sigma - m_sigma', u>
    with u the lattice lift on the sigma' side.  Exact for rational slopes
    (clearing denominators and dividing back is the same computation by
    linearity of the pairing)."""
    if curve is None:
        curve = wall_curve(s.fan, wall)
    i, j = wall.cones
    diff = vsub(s.slopes[i], s.slopes[j])
    return frac(vdot(diff, curve.lift))


def wall_numbers(s: SupportFunction) -> tuple[Fraction, ...]:
    return tuple(intersection_number(s, w) for w in s.fan.walls)


def divisor_wall_number(D: ToricDivisor, wall: Wall) -> Fraction:
    return intersection_number(support_from_divisor(D), wall)


def classify_convexity(s: SupportFunction) -> ConvexityReport:
    """Convexity in the divisor sense: convex (basepoint free) iff every
    wall bend is >= 0; strict additionally needs all bends nonzero and
    pairwise distinct slopes over all maximal cones (ample)."""
    numbers = wall_numbers(s)
    convex = all(n >= 0 for n in numbers)
    concave = all(n <= 0 for n in numbers)
    distinct = len(set(s.slopes)) == len(s.slopes)
    nowhere_flat = all(n != 0 for n in numbers)
    return ConvexityReport(
        convex=convex,
        strictly_convex=convex and nowhere_flat and distinct,
        concave=concave,
        strictly_concave=concave and nowhere_flat and distinct,
    )


# ---------------------------------------------------------------------------
# polytopes and volumes
# ---------------------------------------------------------------------------

def polytope_of_divisor(D: ToricDivisor) -> RationalPolytope:
    """The section polytope {m : <m, u_rho> >= -a_rho for all rays}.

    For divisors with convex support this is the hull of the Cartier data;
    otherwise vertices are enumerated from the ray constraints directly.
    An empty vertex set is a valid result.
    """
    try:
        s = support_from_divisor(D)
    except NotQCartier:
        s = None
    if s is not None and all(n >= 0 for n in wall_numbers(s)):
        return convex_hull(s.slopes)
    return _halfspace_vertices(D)


def _halfspace_vertices(D: ToricDivisor) -> RationalPolytope:
    import itertools

    dim = D.fan.dim
    rays = D.fan.rays
    rhs = [-a for a in D.coefficients]
    vertices = set()
    for subset in itertools.combinations(range(len(rays)), dim):
        rows = [rays[i] for i in subset]
        if mat_rank(rows) != dim:
            continue
        point = solve_exact(rows, [rhs[i] for i in subset])
        if point is None:
            continue
        if all(vdot(rays[i], point) >= rhs[i] for i in range(len(rays))):
            vertices.add(ratvec(point))
    if not vertices:
        return RationalPolytope(dim, ())
    hull = convex_hull(vertices)
    return hull


def newton_polytope(s: SupportFunction) -> RationalPolytope:
    """Hull of the slope covectors of a convex piecewise linear function
    (max of its linear pieces); equals the negated section polytope of the
    negated divisor."""
    if any(n > 0 for n in wall_numbers(s)):
        raise NotConvexFunction(
            "support has a positive bend; not a max of linear pieces")
    return convex_hull(s.slopes)


def ehrhart_volume_estimate(P: RationalPolytope, m_max: int) -> tuple[Fraction, ...]:
    """Normalized lattice-point counts n! count(m) / m^n for m = 1..m_max;
    the sequence converges to the mixed volume for full-dimensional lattice
    polytopes."""
    if not P.is_lattice():
        raise NotLatticePolytope("vertices are not integral")
    n = P.dimension
    factor = 1
    for k in range(2, n + 1):
        factor *= k
    out = []
    for m in range(1, m_max + 1):
        count = lattice_point_count(P, m)
        out.append(Fraction(factor * count, m ** n))
    return tuple(out)


def line_bundle_volume(D: ToricDivisor) -> Fraction:
    """Volume of the associated line bundle: the mixed volume of the
    section polytope (the exact limit of the normalized section counts)."""
    return mixed_volume(polytope_of_divisor(D))
