"""Feedforward ReLU networks with exact rational weights.

A network of architecture (n0, n1, ..., nk; 1) is a chain of k+1 rational
matrices; the forward pass alternates matrix application with coordinatewise
max{0, .} and applies no activation on the last layer.  Biases are optional
and only the affine-shift construction ever produces them; everything in the
toric pipeline requires them absent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .errors import BadNeuronId, Biased, DimensionMismatch, NotShallow, ShapeMismatch
from .exact_math import RatVec, frac, ratvec, vdot

Matrix = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class NeuronId:
    """Coordinates of a neuron: layer in 1..k+1, 1-based row index."""

    layer: int
    index: int


@dataclass(frozen=True)
class NetworkSpec:
    """Raw architecture plus weight data, prior to validation."""

    architecture: tuple[int, ...]        # (n0, n1, ..., nk, 1)
    layers: tuple[Matrix, ...]           # k+1 matrices, L_i of shape n_i x n_{i-1}
    biases: tuple[RatVec, ...] | None = None


@dataclass(frozen=True)
class ValidatedNetwork:
    """A NetworkSpec whose shape chain has been verified and whose entries
    are in canonical rational form."""

    architecture: tuple[int, ...]
    layers: tuple[Matrix, ...]
    biases: tuple[RatVec, ...] | None = None

    @property
    def input_dim(self) -> int:
        return self.architecture[0]

    @property
    def hidden_layers(self) -> int:
        return len(self.architecture) - 2

    @property
    def is_unbiased(self) -> bool:
        if self.biases is None:
            return True
        return all(all(b == 0 for b in vec) for vec in self.biases)

    def spec(self) -> NetworkSpec:
        return NetworkSpec(self.architecture, self.layers, self.biases)


def network(layers, biases=None) -> ValidatedNetwork:
    """Build and validate a network directly from nested weight lists."""
    mats = tuple(tuple(ratvec(row) for row in layer) for layer in layers)
    if not mats or not mats[0]:
        raise ShapeMismatch(1, "network needs at least one nonempty layer")
    arch = (len(mats[0][0]),) + tuple(len(m) for m in mats)
    b = None
    if biases is not None:
        b = tuple(ratvec(vec) for vec in biases)
    return validate(NetworkSpec(arch, mats, b))


def validate(spec: NetworkSpec) -> ValidatedNetwork:
    """Verify the shape chain and canonicalize all rational entries."""
    arch = tuple(int(n) for n in spec.architecture)
    if len(arch) < 3:
        raise ShapeMismatch(0, "architecture needs at least (n0, n1; 1)")
    if arch[-1] != 1:
        raise ShapeMismatch(len(arch) - 1, "output width must be 1")
    if any(n < 0 for n in arch) or arch[0] < 1:
        raise ShapeMismatch(0, f"invalid widths {arch}")
    if len(spec.layers) != len(arch) - 1:
        raise ShapeMismatch(0, f"expected {len(arch) - 1} layers, got {len(spec.layers)}")
    layers = []
    for i, layer in enumerate(spec.layers, start=1):
        rows = tuple(tuple(frac(x) for x in row) for row in layer)
        if len(rows) != arch[i]:
            raise ShapeMismatch(i, f"expected {arch[i]} rows, got {len(rows)}")
        for row in rows:
            if len(row) != arch[i - 1]:
                raise ShapeMismatch(i, f"row length {len(row)} != {arch[i - 1]}")
        layers.append(rows)
    biases = None
    if spec.biases is not None:
        biases = []
        for i, vec in enumerate(spec.biases, start=1):
            vec = ratvec(vec)
            if len(vec) != arch[i]:
                raise ShapeMismatch(i, f"bias length {len(vec)} != {arch[i]}")
            biases.append(vec)
        biases = tuple(biases)
    return ValidatedNetwork(arch, tuple(layers), biases)


def _apply_layer(net: ValidatedNetwork, i: int, x: RatVec) -> RatVec:
    """Pre-activation output of layer i (1-based) on input x."""
    rows = net.layers[i - 1]
    out = [vdot(row, x) for row in rows]
    if net.biases is not None:
        out = [v + b for v, b in zip(out, net.biases[i - 1])]
    return tuple(out)


def _relu(v: RatVec) -> RatVec:
    zero = Fraction(0)
    return tuple(x if x > 0 else zero for x in v)


def evaluate(net: ValidatedNetwork, x) -> Fraction:
    """Exact forward pass; no activation on the last layer."""
    x = ratvec(x)
    if len(x) != net.input_dim:
        raise DimensionMismatch(f"point has dimension {len(x)}, expected {net.input_dim}")
    for i in range(1, len(net.layers)):
        x = _relu(_apply_layer(net, i, x))
    out = _apply_layer(net, len(net.layers), x)
    return frac(out[0])


def neuron_value(net: ValidatedNetwork, neuron: NeuronId, x) -> Fraction:
    """Post-activation value of a hidden neuron at x (pre-activation for the
    output neuron)."""
    x = ratvec(x)
    if len(x) != net.input_dim:
        raise DimensionMismatch(f"point has dimension {len(x)}, expected {net.input_dim}")
    nlayers = len(net.layers)
    if not 1 <= neuron.layer <= nlayers:
        raise BadNeuronId(f"layer {neuron.layer} outside 1..{nlayers}")
    if not 1 <= neuron.index <= net.architecture[neuron.layer]:
        raise BadNeuronId(f"index {neuron.index} outside layer {neuron.layer}")
    for i in range(1, neuron.layer):
        x = _relu(_apply_layer(net, i, x))
    pre = frac(_apply_layer(net, neuron.layer, x)[neuron.index - 1])
    if neuron.layer == nlayers:
        return pre
    return pre if pre > 0 else Fraction(0)


def reduce_shallow(net: ValidatedNetwork) -> ValidatedNetwork:
    """Normal form of a shallow unbiased network.

    Deletes zero rows, merges positively parallel row pairs into the
    lower-indexed row, then clears denominators so that every remaining row
    is integral with coordinate gcd 1.  The computed function is unchanged.
    """
    if net.hidden_layers != 1:
        raise NotShallow(f"architecture {net.architecture} has depth != 2")
    if not net.is_unbiased:
        raise Biased("reduction is defined for unbiased networks")
    rows = [list(r) for r in net.layers[0]]
    weights = list(net.layers[1][0])

    keep = [i for i, row in enumerate(rows) if any(x != 0 for x in row)]
    rows = [rows[i] for i in keep]
    weights = [weights[i] for i in keep]

    removed = set()
    for i in range(len(rows)):
        if i in removed:
            continue
        for j in range(i + 1, len(rows)):
            if j in removed:
                continue
            k = _positive_parallel_factor(rows[j], rows[i])
            if k is not None:
                weights[i] += k * weights[j]
                removed.add(j)
    rows = [r for i, r in enumerate(rows) if i not in removed]
    weights = [w for i, w in enumerate(weights) if i not in removed]

    if not rows:
        # Every neuron was a zero row: the function is identically zero.
        empty = NetworkSpec((net.input_dim, 0, 1), ((), ((),)))
        return validate(empty)

    denominator_lcm = 1
    for row in rows:
        for x in row:
            denominator_lcm = lcm(denominator_lcm, x.denominator)
    new_rows = []
    new_weights = []
    for row, w in zip(rows, weights):
        scaled = [x * denominator_lcm for x in row]
        row_gcd = 0
        for x in scaled:
            row_gcd = gcd(row_gcd, abs(int(x)))
        factor = Fraction(denominator_lcm, row_gcd)
        new_rows.append(tuple(x * factor for x in row))
        new_weights.append(w / factor)
    return network([new_rows, [new_weights]])


def _positive_parallel_factor(row_a, row_b) -> Fraction | None:
    """Returns k > 0 with row_a = k * row_b, or None."""
    k = None
    for a, b in zip(row_a, row_b):
        if b == 0:
            if a != 0:
                return None
            continue
        ratio = a / b
        if k is None:
            k = ratio
        elif ratio != k:
            return None
    if k is None or k <= 0:
        return None
    return k


def is_reduced(net: ValidatedNetwork) -> bool:
    """Structural check of the four normal-form conditions."""
    if net.hidden_layers != 1 or not net.is_unbiased:
        return False
    rows = net.layers[0]
    for row in rows:
        if all(x == 0 for x in row):
            return False
        if any(x.denominator != 1 for x in row):
            return False
        g = 0
        for x in row:
            g = gcd(g, abs(int(x)))
        if g != 1:
            return False
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            if _positive_parallel_factor(rows[j], rows[i]) is not None:
                return False
    return True


def affine_shift(net: ValidatedNetwork, slope, constant=0) -> ValidatedNetwork:
    """Network of identical depth computing f + g for g(x) = slope.x + c.

    Two extra channels per hidden layer carry max{0, g} and max{0, -g};
    the output layer recombines them with weights (+1, -1).  With c = 0 an
    unbiased input stays unbiased.
    """
    slope = ratvec(slope)
    constant = frac(constant)
    if len(slope) != net.input_dim:
        raise DimensionMismatch(
            f"shift slope has dimension {len(slope)}, expected {net.input_dim}")
    k = net.hidden_layers
    zero = Fraction(0)
    neg_slope = tuple(-x for x in slope)

    first = tuple(net.layers[0]) + (slope, neg_slope)
    layers = [first]
    for i in range(2, k + 1):
        old = net.layers[i - 1]
        width = len(old[0])
        rows = [row + (zero, zero) for row in old]
        rows.append(tuple([zero] * width) + (Fraction(1), zero))
        rows.append(tuple([zero] * width) + (zero, Fraction(1)))
        layers.append(tuple(rows))
    last = net.layers[k][0]
    layers.append((last + (Fraction(1), Fraction(-1)),))

    keep_biases = net.biases is not None or constant != 0
    biases = None
    if keep_biases:
        base = net.biases
        if base is None:
            base = tuple(tuple([zero] * net.architecture[i + 1])
                         for i in range(k + 1))
        biases = [base[0] + (constant, -constant)]
        for i in range(1, k):
            biases.append(base[i] + (zero, zero))
        biases.append(base[k])
        biases = tuple(biases)
    return network(layers, biases)
