"""Central polyhedral fans of unbiased ReLU networks.

The fan of a network is built in two stages: the central arrangement of the
first-layer hyperplanes, then one level-set refinement pass per deeper hidden
layer, splitting each maximal cone wherever the composed (cone-linear) neuron
functional changes sign.  Cones carry both generators (extreme rays) and an
irredundant halfspace description; all data is integer and exact.

Deterministic ordering: in the plane, rays and maximal cones are sorted
counterclockwise starting from the positive x-axis, which matches the usual
way these fans are drawn; in higher dimension both are sorted
lexicographically by their (sorted) generator tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key

from .errors import Biased, NotEssential, RelutoricError
from .exact_math import (
    IntVec,
    integer_kernel_direction,
    is_zero_vector,
    mat_rank,
    rational_to_primitive,
    ratvec,
    sign_canonical,
    vdot,
    vneg,
)
from .network import ValidatedNetwork

LAYER1 = "layer1"
SYNTHETIC = "synthetic"
EXTENDED = "extended"
BENT = "bent"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Hyperplane:
    """A central hyperplane, identified by its sign-canonical primitive
    normal, together with where it came from."""

    normal: IntVec
    kind: str = LAYER1
    neurons: tuple[tuple[int, int], ...] = ()


def hyperplane(normal, kind: str = LAYER1, neurons=()) -> Hyperplane:
    prim = sign_canonical(rational_to_primitive(normal))
    return Hyperplane(prim, kind, tuple(neurons))


def merge_hyperplanes(hyperplanes) -> tuple[Hyperplane, ...]:
    """Deduplicate by normal, keeping first-appearance order and merging
    neuron provenance."""
    order: list[IntVec] = []
    merged: dict[IntVec, Hyperplane] = {}
    for h in hyperplanes:
        if h.normal not in merged:
            order.append(h.normal)
            merged[h.normal] = h
        else:
            old = merged[h.normal]
            neurons = old.neurons + tuple(n for n in h.neurons if n not in old.neurons)
            kind = old.kind if old.kind != SYNTHETIC else h.kind
            merged[h.normal] = Hyperplane(old.normal, kind, neurons)
    return tuple(merged[n] for n in order)


@dataclass(frozen=True)
class Cone:
    """A strongly convex rational polyhedral cone with extreme rays and an
    irredundant inward facet description."""

    rays: tuple[IntVec, ...]
    halfspaces: tuple[IntVec, ...]
    dim: int

    def contains(self, x) -> bool:
        x = ratvec(x)
        return all(vdot(n, x) >= 0 for n in self.halfspaces)

    def interior_point(self) -> IntVec:
        """Sum of the extreme rays; interior for full-dimensional cones,
        relative-interior in general."""
        return tuple(sum(r[i] for r in self.rays) for i in range(self.dim))


@dataclass(frozen=True)
class Wall:
    """A codimension-one cone shared by two maximal cones."""

    generators: tuple[IntVec, ...]
    cones: tuple[int, int]
    normal: IntVec                       # sign-canonical normal of the span
    kind: str = UNKNOWN
    neurons: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class Fan:
    """A complete central fan, maximal cones plus derived wall data."""

    dim: int
    rays: tuple[IntVec, ...]
    maximal_cones: tuple[Cone, ...]
    walls: tuple[Wall, ...]
    hyperplanes: tuple[Hyperplane, ...] = ()


@dataclass(frozen=True)
class FanReport:
    """Structured result of validate_fan; never raises."""

    strongly_convex: bool
    face_property: bool
    two_sided: bool
    positively_spanning: bool
    violations: tuple[str, ...] = ()

    @property
    def complete(self) -> bool:
        return self.two_sided and self.positively_spanning

    @property
    def valid(self) -> bool:
        return self.strongly_convex and self.face_property and self.complete


# ---------------------------------------------------------------------------
# low-level cone machinery
# ---------------------------------------------------------------------------

def _rays_from_halfspaces(normals, dim: int) -> list[IntVec]:
    """Extreme rays of {x : n.x >= 0 for all n}, assuming the cone is
    pointed.  Candidates come from (dim-1)-subsets of the constraints; a
    candidate is extreme iff its active constraints span a hyperplane."""
    rays = set()
    for subset in itertools.combinations(normals, dim - 1):
        if mat_rank(subset) != dim - 1:
            continue
        direction = integer_kernel_direction(subset)
        for cand in (direction, vneg(direction)):
            if cand in rays:
                continue
            products = [vdot(n, cand) for n in normals]
            if any(p < 0 for p in products):
                continue
            active = [n for n, p in zip(normals, products) if p == 0]
            if mat_rank(active) == dim - 1:
                rays.add(cand)
    return sorted(rays)


def _facet_normals(rays, candidates, dim: int) -> tuple[IntVec, ...]:
    """Filter candidate valid constraints down to facet-defining ones."""
    facets = []
    seen = set()
    for n in candidates:
        if n in seen:
            continue
        seen.add(n)
        tight = [r for r in rays if vdot(n, r) == 0]
        if tight and mat_rank(tight) == dim - 1:
            facets.append(n)
    return tuple(sorted(facets))


def _cone_from_halfspaces(normals, dim: int) -> Cone:
    rays = _rays_from_halfspaces(normals, dim)
    return Cone(tuple(rays), _facet_normals(rays, normals, dim), dim)


def halfspaces_from_rays(rays, dim: int) -> tuple[IntVec, ...]:
    """Irredundant inward facet normals of a full-dimensional cone given by
    generators.  Brute force over (dim-1)-subsets of the rays."""
    rays = [tuple(int(x) for x in r) for r in rays]
    candidates = set()
    for subset in itertools.combinations(rays, dim - 1):
        if mat_rank(subset) != dim - 1:
            continue
        normal = integer_kernel_direction(subset)
        for n in (normal, vneg(normal)):
            if all(vdot(n, r) >= 0 for r in rays):
                candidates.add(n)
    return _facet_normals(rays, sorted(candidates), dim)


def cone_from_rays(rays, dim: int) -> Cone:
    prim = []
    for r in rays:
        p = rational_to_primitive(r)
        if p not in prim:
            prim.append(p)
    halfspaces = halfspaces_from_rays(prim, dim)
    return Cone(tuple(sorted(prim)), halfspaces, dim)


def _split_cone(cone: Cone, cut: IntVec) -> tuple[Cone, Cone] | None:
    """Split a maximal cone along a hyperplane through its interior.

    Returns (negative side, positive side) or None when the hyperplane does
    not separate the cone's interior.
    """
    products = [vdot(cut, r) for r in cone.rays]
    if not (any(p > 0 for p in products) and any(p < 0 for p in products)):
        return None
    pos = _cone_from_halfspaces(cone.halfspaces + (cut,), cone.dim)
    neg = _cone_from_halfspaces(cone.halfspaces + (vneg(cut),), cone.dim)
    return neg, pos


# ---------------------------------------------------------------------------
# deterministic ordering
# ---------------------------------------------------------------------------

def _half_of_plane(v: IntVec) -> int:
    x, y = v
    return 0 if (y > 0 or (y == 0 and x > 0)) else 1


def _ray_cmp_2d(a: IntVec, b: IntVec) -> int:
    ha, hb = _half_of_plane(a), _half_of_plane(b)
    if ha != hb:
        return -1 if ha < hb else 1
    cross = a[0] * b[1] - a[1] * b[0]
    if cross == 0:
        return 0
    return -1 if cross > 0 else 1


def sort_rays(rays, dim: int) -> list[IntVec]:
    if dim == 2:
        return sorted(rays, key=cmp_to_key(_ray_cmp_2d))
    return sorted(rays)


def _sort_cones(cones, dim: int) -> list[Cone]:
    if dim == 2:
        def start_ray(cone: Cone) -> IntVec:
            a, b = cone.rays
            cross = a[0] * b[1] - a[1] * b[0]
            return a if cross > 0 else b
        return sorted(cones, key=cmp_to_key(
            lambda c1, c2: _ray_cmp_2d(start_ray(c1), start_ray(c2))))
    return sorted(cones, key=lambda c: tuple(sorted(c.rays)))


# ---------------------------------------------------------------------------
# fan assembly
# ---------------------------------------------------------------------------

def _walls_from_cones(cones, dim: int, provenance) -> tuple[Wall, ...]:
    """Match up facets shared by two maximal cones.

    `provenance` maps a sign-canonical span normal to a (kind, neurons)
    pair; unmatched walls are tagged unknown.
    """
    by_face: dict[tuple[IntVec, ...], list[int]] = {}
    face_normal: dict[tuple[IntVec, ...], IntVec] = {}
    for idx, cone in enumerate(cones):
        for n in cone.halfspaces:
            tight = tuple(sorted(r for r in cone.rays if vdot(n, r) == 0))
            by_face.setdefault(tight, []).append(idx)
            face_normal[tight] = sign_canonical(n)
    walls = []
    for tight, incident in by_face.items():
        if len(incident) != 2:
            continue
        normal = face_normal[tight]
        kind, neurons = provenance.get(normal, (UNKNOWN, ()))
        generators = tuple(sort_rays(tight, dim)) if dim == 2 else tight
        walls.append(Wall(generators, (min(incident), max(incident)),
                          normal, kind, neurons))
    if dim == 2:
        walls.sort(key=cmp_to_key(
            lambda w1, w2: _ray_cmp_2d(w1.generators[0], w2.generators[0])))
    else:
        walls.sort(key=lambda w: w.generators)
    return tuple(walls)


def _canonical_cone(cone: Cone, dim: int) -> Cone:
    if dim == 2:
        a, b = cone.rays
        cross = a[0] * b[1] - a[1] * b[0]
        rays = (a, b) if cross > 0 else (b, a)
    else:
        rays = tuple(sorted(cone.rays))
    return Cone(rays, tuple(sorted(cone.halfspaces)), dim)


def _assemble_fan(cones, dim: int, hyperplanes, bent_cuts=()) -> Fan:
    cones = _sort_cones([_canonical_cone(c, dim) for c in cones], dim)
    rays = sort_rays({r for c in cones for r in c.rays}, dim)
    provenance: dict[IntVec, tuple[str, tuple]] = {}
    for normal, tag in bent_cuts:
        kind, neurons = provenance.get(normal, (BENT, ()))
        if tag not in neurons:
            neurons = neurons + (tag,)
        provenance[normal] = (BENT, neurons)
    for h in hyperplanes:
        provenance[h.normal] = (h.kind, h.neurons)
    walls = _walls_from_cones(cones, dim, provenance)
    return Fan(dim, tuple(rays), tuple(cones), walls, tuple(hyperplanes))


def central_fan(hyperplanes, dim: int) -> Fan:
    """Fan of a central hyperplane arrangement, cells enumerated exactly.

    Raises NotEssential when the normals do not span the ambient space (the
    complex then has a lineality space and is only a generalized fan).
    """
    if dim < 2:
        raise ValueError("central fans need ambient dimension >= 2")
    merged = merge_hyperplanes(hyperplanes)
    if not merged:
        raise NotEssential("no hyperplanes given")
    normals = [h.normal for h in merged]
    if mat_rank(normals) < dim:
        raise NotEssential(
            f"normals span rank {mat_rank(normals)} < {dim}; lineality remains")
    rays = _arrangement_rays(normals, dim)
    if dim == 2:
        cones = _planar_cells(rays)
    else:
        cones = _cells_by_sign_vector(normals, rays, dim)
    return _assemble_fan(cones, dim, merged)


def augmented_central_fan(hyperplanes, dim: int) -> Fan:
    """central_fan, adding synthetic coordinate hyperplanes whenever the
    arrangement is not essential (they carry zero bend by construction)."""
    merged = merge_hyperplanes(hyperplanes)
    normals = [h.normal for h in merged]
    if not merged or mat_rank(normals) < dim:
        coords = []
        for i in range(dim):
            e = tuple(1 if j == i else 0 for j in range(dim))
            coords.append(Hyperplane(e, SYNTHETIC))
        merged = merge_hyperplanes(list(merged) + coords)
    return central_fan(merged, dim)


def _arrangement_rays(normals, dim: int) -> list[IntVec]:
    rays = set()
    for subset in itertools.combinations(normals, dim - 1):
        if mat_rank(subset) != dim - 1:
            continue
        direction = integer_kernel_direction(subset)
        for cand in (direction, vneg(direction)):
            if cand in rays:
                continue
            active = [n for n in normals if vdot(n, cand) == 0]
            if mat_rank(active) == dim - 1:
                rays.add(cand)
    return sort_rays(rays, dim)


def _planar_cells(rays) -> list[Cone]:
    def rot(v: IntVec) -> IntVec:
        return (-v[1], v[0])

    cones = []
    for a, b in zip(rays, rays[1:] + rays[:1]):
        na = rot(a)
        if vdot(na, b) < 0:
            na = vneg(na)
        nb = rot(b)
        if vdot(nb, a) < 0:
            nb = vneg(nb)
        cones.append(Cone((a, b), tuple(sorted({na, nb})), 2))
    return cones


def _cells_by_sign_vector(normals, rays, dim: int) -> list[Cone]:
    ray_signs = [tuple(vdot(n, r) for n in normals) for r in rays]
    cones = []
    for signs in itertools.product((1, -1), repeat=len(normals)):
        members = [rays[i] for i, prods in enumerate(ray_signs)
                   if all(s * p >= 0 for s, p in zip(signs, prods))]
        if len(members) < dim:
            continue
        probe = tuple(sum(r[i] for r in members) for i in range(dim))
        if any(s * vdot(n, probe) <= 0 for s, n in zip(signs, normals)):
            continue
        oriented = [n if s > 0 else vneg(n) for s, n in zip(signs, normals)]
        cones.append(Cone(tuple(sorted(members)),
                          _facet_normals(members, oriented, dim), dim))
    return cones


# ---------------------------------------------------------------------------
# the ReLU fan
# ---------------------------------------------------------------------------

def layer_one_hyperplanes(net: ValidatedNetwork) -> tuple[Hyperplane, ...]:
    """Nondegenerate first-layer rows as canonical hyperplanes, merged."""
    planes = []
    for j, row in enumerate(net.layers[0], start=1):
        if is_zero_vector(row):
            continue
        planes.append(hyperplane(row, LAYER1, ((1, j),)))
    return merge_hyperplanes(planes)


def build_relu_fan(net: ValidatedNetwork, diagnostics: list | None = None) -> Fan:
    """Canonical polyhedral complex of an unbiased network, as a fan.

    Starts from the central fan of the first layer (synthetically augmented
    with coordinate hyperplanes when not essential), then refines cone by
    cone along the zero sets of the composed functionals of each deeper
    hidden layer.  The output layer never refines.
    """
    if not net.is_unbiased:
        raise Biased("the toric pipeline requires an unbiased network")
    dim = net.input_dim
    planes = layer_one_hyperplanes(net)
    base = augmented_central_fan(planes, dim)
    planes = base.hyperplanes

    cones = list(base.maximal_cones)
    prefix = [_first_layer_matrix(net, cone) for cone in cones]
    bent_cuts: list[tuple[IntVec, tuple[int, int]]] = []
    k = net.hidden_layers
    for layer in range(2, k + 1):
        rows = net.layers[layer - 1]
        next_cones: list[Cone] = []
        next_prefix = []
        for cone, w in zip(cones, prefix):
            functionals = [_compose(row, w) for row in rows]
            pieces = [cone]
            for j, phi in enumerate(functionals, start=1):
                if is_zero_vector(phi):
                    if diagnostics is not None:
                        diagnostics.append(
                            f"neuron ({layer},{j}) is identically zero on a cone")
                    continue
                cut = rational_to_primitive(phi)
                refined = []
                for piece in pieces:
                    split = _split_cone(piece, cut)
                    if split is None:
                        refined.append(piece)
                    else:
                        refined.extend(split)
                        bent_cuts.append((sign_canonical(cut), (layer, j)))
                pieces = refined
            for piece in pieces:
                probe = piece.interior_point()
                active_rows = []
                for phi in functionals:
                    if vdot(phi, probe) > 0:
                        active_rows.append(phi)
                    else:
                        active_rows.append(tuple(Fraction(0) for _ in range(dim)))
                next_cones.append(piece)
                next_prefix.append(tuple(active_rows))
        cones = next_cones
        prefix = next_prefix
    return _assemble_fan(cones, dim, planes, bent_cuts)


def _first_layer_matrix(net: ValidatedNetwork, cone: Cone):
    """Linear map computed by ReLU . L1 on a maximal cone of the layer-one
    arrangement."""
    probe = cone.interior_point()
    rows = []
    zero = tuple(Fraction(0) for _ in range(net.input_dim))
    for row in net.layers[0]:
        rows.append(row if vdot(row, probe) > 0 else zero)
    return tuple(rows)


def _compose(out_row, matrix):
    """Covector out_row . matrix."""
    dim = len(matrix[0]) if matrix else 0
    return tuple(sum(c * row[i] for c, row in zip(out_row, matrix))
                 for i in range(dim))


# ---------------------------------------------------------------------------
# queries and validation
# ---------------------------------------------------------------------------

def enumerate_walls(fan: Fan) -> list[Wall]:
    return list(fan.walls)


def wall_groups(fan: Fan) -> list[tuple[IntVec, list[int]]]:
    """Wall indices grouped by the full hyperplane containing them, ordered
    by sign-canonical normal."""
    groups: dict[IntVec, list[int]] = {}
    for i, wall in enumerate(fan.walls):
        groups.setdefault(wall.normal, []).append(i)
    return sorted(groups.items())


def cone_containing(fan: Fan, x) -> int:
    """Lowest-indexed maximal cone whose closure contains x."""
    x = ratvec(x)
    for i, cone in enumerate(fan.maximal_cones):
        if cone.contains(x):
            return i
    raise RelutoricError("point escapes the fan; fan is not complete")


def validate_fan(fan: Fan) -> FanReport:
    violations = []

    strongly_convex = True
    for i, cone in enumerate(fan.maximal_cones):
        if mat_rank(cone.halfspaces) < fan.dim:
            strongly_convex = False
            violations.append(f"cone {i} contains a line")

    face_ok = True
    seen = set()
    for i, cone in enumerate(fan.maximal_cones):
        key = tuple(sorted(cone.rays))
        if key in seen:
            face_ok = False
            violations.append(f"cone {i} duplicates another maximal cone")
        seen.add(key)
    for i, j in itertools.combinations(range(len(fan.maximal_cones)), 2):
        ci, cj = fan.maximal_cones[i], fan.maximal_cones[j]
        shared = _rays_from_halfspaces(ci.halfspaces + cj.halfspaces, fan.dim)
        for cone, label in ((ci, i), (cj, j)):
            if not set(shared) <= set(cone.rays):
                face_ok = False
                violations.append(
                    f"intersection of cones {i},{j} is not a face of cone {label}")
                continue
            active = [n for n in cone.halfspaces
                      if all(vdot(n, r) == 0 for r in shared)]
            exposed = [r for r in cone.rays
                       if all(vdot(n, r) == 0 for n in active)]
            if set(exposed) != set(shared):
                face_ok = False
                violations.append(
                    f"intersection of cones {i},{j} is not exposed in cone {label}")

    counts: dict[tuple[IntVec, ...], int] = {}
    for cone in fan.maximal_cones:
        for n in cone.halfspaces:
            tight = tuple(sorted(r for r in cone.rays if vdot(n, r) == 0))
            counts[tight] = counts.get(tight, 0) + 1
    two_sided = True
    for tight, count in sorted(counts.items()):
        if count != 2:
            two_sided = False
            violations.append(
                f"facet {tight} has {count} incident maximal cones, expected 2")

    spanning = _positively_spanning(fan.rays, fan.dim)
    if not spanning:
        violations.append("rays do not positively span the ambient space")

    return FanReport(strongly_convex, face_ok, two_sided, spanning,
                     tuple(violations))


def _positively_spanning(rays, dim: int) -> bool:
    if mat_rank(rays) < dim:
        return False
    # Rays positively span iff the polar cone {c : c.r >= 0 for all r} is
    # trivial; its extreme rays would show up as kernel directions.
    for subset in itertools.combinations(rays, dim - 1):
        if mat_rank(subset) != dim - 1:
            continue
        direction = integer_kernel_direction(subset)
        for cand in (direction, vneg(direction)):
            if all(vdot(cand, r) >= 0 for r in rays):
                return False
    return True
