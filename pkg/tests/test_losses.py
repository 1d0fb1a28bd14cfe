import math

import pytest
import torch

from cli.selftest import naive_cross_entropy, naive_distillation
from losses import agsd_loss, cross_entropy, ibsd_loss, kl_div, softmax_temp, total_loss
from models import ContractViolation, DimensionError, LossConfig, NumericError, TemperatureError


def _pair():
    return (
        torch.tensor([1.0, 0.0], dtype=torch.float64),
        torch.tensor([0.0, 1.0], dtype=torch.float64),
    )


class TestSoftmaxTemp:
    def test_sums_to_one_and_is_shift_invariant(self):
        logits = torch.randn(5, 7, dtype=torch.float64, generator=torch.Generator().manual_seed(0))
        p = softmax_temp(logits, 2.0)
        torch.testing.assert_close(p.sum(-1), torch.ones(5, dtype=torch.float64))
        torch.testing.assert_close(softmax_temp(logits + 100.0, 2.0), p)

    def test_large_logits_stay_finite(self):
        p = softmax_temp(torch.tensor([1000.0, 0.0]), 1.0)
        assert torch.isfinite(p).all()
        assert p[0].item() == pytest.approx(1.0)

    @pytest.mark.parametrize("t", [0.0, -1.0])
    def test_non_positive_temperature(self, t):
        with pytest.raises(TemperatureError):
            softmax_temp(torch.zeros(3), t)

    def test_non_finite_logits(self):
        with pytest.raises(NumericError):
            softmax_temp(torch.tensor([0.0, float("nan")]), 1.0)


class TestKL:
    def test_hand_value_t1(self):
        a, b = _pair()
        assert float(kl_div(softmax_temp(a, 1.0), softmax_temp(b, 1.0))) == pytest.approx(0.46212, abs=1e-4)

    def test_hand_value_t5(self):
        a, b = _pair()
        assert float(kl_div(softmax_temp(a, 5.0), softmax_temp(b, 5.0))) == pytest.approx(0.01993, abs=1e-4)

    def test_zero_for_identical(self):
        p = softmax_temp(torch.randn(4, 6, dtype=torch.float64), 3.0)
        assert kl_div(p, p).abs().max().item() < 1e-12

    def test_zero_probability_terms_contribute_nothing(self):
        p = torch.tensor([1.0, 0.0], dtype=torch.float64)
        q = torch.tensor([0.5, 0.5], dtype=torch.float64)
        assert float(kl_div(p, q)) == pytest.approx(math.log(2.0))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            kl_div(torch.ones(3) / 3, torch.ones(4) / 4)

    def test_non_negative(self):
        gen = torch.Generator().manual_seed(1)
        for _ in range(50):
            p = softmax_temp(torch.randn(3, 5, generator=gen), 1.0)
            q = softmax_temp(torch.randn(3, 5, generator=gen), 1.0)
            assert (kl_div(p, q) >= -1e-7).all()


class TestDistillationLosses:
    def test_ibsd_matches_naive_oracle(self):
        gen = torch.Generator().manual_seed(2)
        for c in range(2, 17):
            a = torch.randn(3, c, generator=gen, dtype=torch.float64)
            b = torch.randn(3, c, generator=gen, dtype=torch.float64)
            assert float(ibsd_loss(a, b, 5.0)) == pytest.approx(naive_distillation(a, b, 5.0), abs=1e-9)

    def test_agsd_matches_naive_oracle(self):
        gen = torch.Generator().manual_seed(3)
        a = torch.randn(4, 6, generator=gen, dtype=torch.float64)
        b = torch.randn(4, 6, generator=gen, dtype=torch.float64)
        assert float(agsd_loss(a, b, 1.0)) == pytest.approx(naive_distillation(a, b, 1.0), abs=1e-9)

    def test_ibsd_is_not_symmetric(self):
        a = torch.tensor([[3.0, 0.0, 0.0]], dtype=torch.float64)
        b = torch.tensor([[1.0, 1.0, -2.0]], dtype=torch.float64)
        assert float(ibsd_loss(a, b, 1.0)) != pytest.approx(float(ibsd_loss(b, a, 1.0)))

    def test_gradients_flow_through_both_arguments(self):
        a = torch.randn(2, 4, dtype=torch.float64, requires_grad=True)
        b = torch.randn(2, 4, dtype=torch.float64, requires_grad=True)
        ibsd_loss(a, b, 5.0).backward()
        assert a.grad.abs().sum() > 0
        assert b.grad.abs().sum() > 0

    def test_detached_teacher_blocks_teacher_gradient(self):
        a = torch.randn(2, 4, dtype=torch.float64, requires_grad=True)
        b = torch.randn(2, 4, dtype=torch.float64, requires_grad=True)
        ibsd_loss(a, b, 5.0, detach_teacher=True).backward()
        assert a.grad is None
        assert b.grad.abs().sum() > 0

    def test_contract_check_rejects_live_augmented_logits(self):
        a = torch.randn(2, 4)
        live = torch.randn(2, 4, requires_grad=True)
        with pytest.raises(ContractViolation):
            agsd_loss(a, live, 1.0, check_contract=True)
        agsd_loss(a, live.detach(), 1.0, check_contract=True)

    def test_batch_size_mismatch(self):
        with pytest.raises(DimensionError):
            ibsd_loss(torch.zeros(2, 3), torch.zeros(3, 3), 1.0)


class TestCrossEntropy:
    def test_uniform_binary(self):
        ce = cross_entropy(torch.tensor([[1.0, 0.0]]), torch.tensor([[0.5, 0.5]]))
        assert float(ce) == pytest.approx(0.69315, abs=1e-5)

    def test_perfect_prediction_is_zero(self):
        ce = cross_entropy(torch.tensor([[0.0, 1.0]]), torch.tensor([[0.0, 1.0]]))
        assert float(ce) == pytest.approx(0.0, abs=1e-12)

    def test_zero_probability_on_true_class_is_clamped(self):
        ce = cross_entropy(torch.tensor([[1.0, 0.0]], dtype=torch.float64), torch.tensor([[0.0, 1.0]], dtype=torch.float64))
        assert float(ce) == pytest.approx(-math.log(1e-12))

    def test_matches_naive_oracle(self):
        gen = torch.Generator().manual_seed(4)
        logits = torch.randn(6, 5, generator=gen, dtype=torch.float64)
        labels = torch.randint(5, (6,), generator=gen)
        onehot = torch.nn.functional.one_hot(labels, 5).to(torch.float64)
        value = float(cross_entropy(onehot, softmax_temp(logits, 1.0)))
        assert value == pytest.approx(naive_cross_entropy(labels.tolist(), logits), abs=1e-9)

    @pytest.mark.parametrize("labels", [[[0.5, 0.5]], [[1.0, 1.0]], [[0.0, 0.0]]])
    def test_rejects_non_one_hot(self, labels):
        with pytest.raises(NumericError):
            cross_entropy(torch.tensor(labels), torch.tensor([[0.5, 0.5]]))


class TestTotalLoss:
    def test_arithmetic(self):
        breakdown = total_loss(torch.tensor(1.0), torch.tensor(0.5), torch.tensor(0.25), LossConfig(lam=0.2, gamma=1.0))
        assert float(breakdown.total) == pytest.approx(1.35, abs=1e-6)

    def test_zero_weights_give_plain_ce(self):
        breakdown = total_loss(torch.tensor(0.7), torch.tensor(3.0), torch.tensor(9.0), LossConfig(lam=0.0, gamma=0.0))
        assert float(breakdown.total) == pytest.approx(0.7)

    def test_non_finite_component_is_named(self):
        with pytest.raises(NumericError) as info:
            total_loss(torch.tensor(1.0), torch.tensor(float("inf")), torch.tensor(0.0), LossConfig())
        assert info.value.component == "ibsd"
