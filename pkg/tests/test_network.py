import random
from fractions import Fraction as F

import pytest

from relutoric.errors import BadNeuronId, Biased, DimensionMismatch, NotShallow, ShapeMismatch
from relutoric.network import (
    NetworkSpec,
    NeuronId,
    affine_shift,
    evaluate,
    is_reduced,
    network,
    neuron_value,
    reduce_shallow,
    validate,
)
from conftest import GOLDEN_LAYERS, rand_point, rand_rational


class TestValidate:
    def test_golden_network(self, golden_net):
        assert golden_net.architecture == (2, 3, 1, 1)
        assert golden_net.is_unbiased

    def test_bad_row_length(self):
        spec = NetworkSpec((2, 3, 1, 1),
                           (((F(0), F(1)), (F(0), F(-1)), (F(1), F(-1))),
                            ((F(1), F(-1)),),  # row too short
                            ((F(1),),)))
        with pytest.raises(ShapeMismatch) as err:
            validate(spec)
        assert err.value.layer == 2

    def test_empty_layer_list(self):
        with pytest.raises(ShapeMismatch):
            validate(NetworkSpec((2,), ()))

    def test_zero_width_hidden_layer_allowed(self):
        net = validate(NetworkSpec((2, 0, 1), ((), ((),))))
        assert evaluate(net, (5, -3)) == 0


class TestEvaluate:
    def test_golden_positive_region(self, golden_net):
        assert evaluate(golden_net, (2, 1)) == 2

    def test_origin(self, golden_net):
        assert evaluate(golden_net, (0, 0)) == 0

    def test_negative_region(self, golden_net):
        # trace: ReLU(L1 x) = (0, 5, 2), L2 . = -3, ReLU -> 0
        assert evaluate(golden_net, (-3, -5)) == 0

    def test_matches_max(self, golden_net):
        rng = random.Random(7)
        for _ in range(25):
            p = rand_point(rng, 2)
            assert evaluate(golden_net, p) == max(F(0), p[0], p[1])

    def test_dimension_check(self, golden_net):
        with pytest.raises(DimensionMismatch):
            evaluate(golden_net, (1, 2, 3))

    def test_positive_homogeneity(self):
        rng = random.Random(11)
        net = network([[[rand_rational(rng) for _ in range(2)] for _ in range(3)],
                       [[rand_rational(rng) for _ in range(3)] for _ in range(2)],
                       [[rand_rational(rng) for _ in range(2)]]])
        for _ in range(20):
            x = rand_point(rng, 2)
            fx = evaluate(net, x)
            for lam in (F(0), F(1, 2), F(3)):
                assert evaluate(net, tuple(lam * c for c in x)) == lam * fx


class TestNeuronValue:
    def test_first_layer(self, golden_net):
        # neuron (1,3) computes max{0, x - y}
        assert neuron_value(golden_net, NeuronId(1, 3), (-3, -5)) == 2

    def test_second_layer(self, golden_net):
        assert neuron_value(golden_net, NeuronId(2, 1), (-3, -5)) == 0

    def test_all_zero_at_origin(self, golden_net):
        for layer, width in ((1, 3), (2, 1), (3, 1)):
            for idx in range(1, width + 1):
                assert neuron_value(golden_net, NeuronId(layer, idx), (0, 0)) == 0

    def test_output_neuron_is_preactivation(self):
        net = network([[[1, 0]], [[-1]]])  # f = -max{0, x}
        assert neuron_value(net, NeuronId(2, 1), (3, 0)) == -3

    def test_bad_id(self, golden_net):
        with pytest.raises(BadNeuronId):
            neuron_value(golden_net, NeuronId(1, 4), (0, 0))
        with pytest.raises(BadNeuronId):
            neuron_value(golden_net, NeuronId(5, 1), (0, 0))


class TestReduceShallow:
    def test_denominator_clearing(self):
        net = network([[[F(2, 3), F(4, 3)]], [[3]]])
        red = reduce_shallow(net)
        assert red.layers[0] == ((F(1), F(2)),)
        assert red.layers[1] == ((F(2),),)

    def test_parallel_merge(self):
        net = network([[[1, 2], [2, 4]], [[1, F(1, 2)]]])
        red = reduce_shallow(net)
        assert red.layers[0] == ((F(1), F(2)),)
        assert red.layers[1] == ((F(2),),)

    def test_zero_row_deletion(self):
        net = network([[[0, 0], [1, 0]], [[5, 1]]])
        red = reduce_shallow(net)
        assert red.layers[0] == ((F(1), F(0)),)
        assert red.layers[1] == ((F(1),),)

    def test_not_shallow(self, golden_net):
        with pytest.raises(NotShallow):
            reduce_shallow(golden_net)

    def test_biased_rejected(self):
        net = network([[[1, 0]], [[1]]], biases=[[1], [0]])
        with pytest.raises(Biased):
            reduce_shallow(net)

    def test_all_rows_zero(self):
        red = reduce_shallow(network([[[0, 0], [0, 0]], [[3, 4]]]))
        assert red.architecture == (2, 0, 1)
        assert evaluate(red, (1, 1)) == 0

    def test_idempotent_and_semantics(self):
        rng = random.Random(23)
        grid = [F(i, 2) for i in range(-4, 5)]
        for _ in range(20):
            rows = [[rand_rational(rng) for _ in range(2)] for _ in range(rng.randint(1, 4))]
            if rng.random() < 0.5:
                rows.append([0, 0])
            if rng.random() < 0.5 and rows:
                factor = F(rng.randint(1, 4), rng.randint(1, 4))
                rows.append([factor * c for c in rows[0]])
            weights = [rand_rational(rng) for _ in rows]
            net = network([rows, [weights]])
            red = reduce_shallow(net)
            assert is_reduced(red) or red.architecture[1] == 0
            again = reduce_shallow(red)
            assert again.layers == red.layers
            for x in grid:
                for y in grid:
                    assert evaluate(net, (x, y)) == evaluate(red, (x, y))


class TestAffineShift:
    def test_negated_ramp(self):
        # f = max{0, x} in one variable; g = -x gives f + g = max{0, -x}
        net = network([[[1]], [[1]]])
        shifted = affine_shift(net, (-1,))
        assert shifted.architecture == (1, 3, 1)
        for x, want in ((-2, 2), (0, 0), (3, 0)):
            assert evaluate(shifted, (x,)) == want

    def test_zero_shift_identity(self, golden_net):
        shifted = affine_shift(golden_net, (0, 0))
        rng = random.Random(3)
        for _ in range(15):
            p = rand_point(rng, 2)
            assert evaluate(shifted, p) == evaluate(golden_net, p)

    def test_golden_with_linear_shift(self, golden_net):
        shifted = affine_shift(golden_net, (1, 1))
        assert evaluate(shifted, (1, 0)) == 2  # max{0,1,0} + 1

    def test_widths_and_depth(self, golden_net):
        shifted = affine_shift(golden_net, (2, -3))
        assert len(shifted.architecture) == len(golden_net.architecture)
        assert shifted.architecture == (2, 5, 3, 1)
        assert shifted.is_unbiased

    def test_affine_constant_makes_biased(self):
        net = network([[[1, 0]], [[1]]])
        shifted = affine_shift(net, (0, 1), constant=F(1, 2))
        assert not shifted.is_unbiased
        rng = random.Random(5)
        for _ in range(15):
            p = rand_point(rng, 2)
            assert evaluate(shifted, p) == evaluate(net, p) + p[1] + F(1, 2)

    def test_biased_input_network(self):
        net = network([[[1, 0], [0, 1]], [[1, 1]]], biases=[[1, -1], [2]])
        shifted = affine_shift(net, (1, 1), constant=3)
        rng = random.Random(9)
        for _ in range(15):
            p = rand_point(rng, 2)
            assert evaluate(shifted, p) == evaluate(net, p) + p[0] + p[1] + 3

    def test_dimension_mismatch(self, golden_net):
        with pytest.raises(DimensionMismatch):
            affine_shift(golden_net, (1, 2, 3))
