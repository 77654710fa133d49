"""Shared fixtures: golden inputs and independent oracles.

The bend oracle below measures how much a function bends across a wall by
exact second differences of function *values*; it never looks at slope or
divisor data, so it is an independent check of the intersection-number path.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from relutoric.exact_math import kernel_normal, pairing_one_solution, vadd, vdot, vneg, vscale
from relutoric.network import network

# Architecture (2, 3, 1; 1) computing max{0, x, y}; the pipeline's golden
# example throughout.
GOLDEN_LAYERS = [[[0, 1], [0, -1], [1, -1]], [[1, -1, 1]], [[1]]]

# Six-piece symmetric function on the three lines y=0, y=x, y=-x with sector
# slopes (counterclockwise from the positive x-axis):
#   3y | x+2y | y | 0 | 2x-2y | -4y
# realizable as a difference of maxima but not by any shallow unbiased net.
SIXPIECE_EXPR = ("max(4*x1 + 5*x2, 3*x1 + 6*x2, 3*x2, 0, 4*x1 - 4*x2)"
                 " - 2*max(0, x2) - 2*max(0, x1 - x2) - 2*max(0, x1 + x2)")
SIXPIECE_SLOPES = {
    (Fraction(0), Fraction(3)),
    (Fraction(1), Fraction(2)),
    (Fraction(0), Fraction(1)),
    (Fraction(0), Fraction(0)),
    (Fraction(2), Fraction(-2)),
    (Fraction(0), Fraction(-4)),
}


@pytest.fixture
def golden_net():
    return network(GOLDEN_LAYERS)


def rand_rational(rng: random.Random, bound: int = 9) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def rand_point(rng: random.Random, dim: int, bound: int = 9):
    return tuple(rand_rational(rng, bound) for _ in range(dim))


def rand_shallow_net(rng: random.Random, dim: int, max_width: int = 6):
    width = rng.randint(1, max_width)
    rows = [[rand_rational(rng) for _ in range(dim)] for _ in range(width)]
    weights = [rand_rational(rng) for _ in range(width)]
    return network([rows, [weights]])


def bend_oracle(value_at, fan, wall) -> Fraction:
    """Second-difference bend of a function across a wall, per unit step of
    the quotient lattice, measured from exact values only.

    `value_at` evaluates the function; the returned number equals the
    intersection number of the function's divisor with the wall curve.
    """
    lo, hi = wall.cones
    second = fan.maximal_cones[hi]
    phi = kernel_normal(wall.generators, fan.dim)
    outside = next(r for r in second.rays if r not in wall.generators)
    if vdot(phi, outside) < 0:
        phi = vneg(phi)
    u = pairing_one_solution(phi)
    p = tuple(Fraction(sum(g[i] for g in wall.generators)) for i in range(fan.dim))
    eps = Fraction(1)
    first = fan.maximal_cones[lo]
    for _ in range(64):
        plus = vadd(p, vscale(eps, u))
        minus = vadd(p, vscale(-eps, u))
        if second.contains(plus) and first.contains(minus):
            break
        eps /= 2
    else:
        raise AssertionError("could not step off the wall")
    bend = value_at(plus) + value_at(minus) - 2 * value_at(p)
    return -bend / eps
