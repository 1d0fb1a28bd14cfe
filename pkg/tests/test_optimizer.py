import pytest
import torch

from models import ConfigurationError, DimensionError
from trainer import AdamState, AdamW, grad_norm, optimizer_update


def _scalar(value):
    return [torch.tensor([value], dtype=torch.float64)]


def test_zero_gradient_without_decay_is_a_fixed_point():
    params = [torch.randn(3, 4, dtype=torch.float64), torch.randn(5, dtype=torch.float64)]
    grads = [torch.zeros_like(p) for p in params]
    state = AdamState.zeros_like(params)
    for _ in range(5):
        new, state = optimizer_update(params, grads, state, 0.1, 0.0)
        for before, after in zip(params, new):
            assert torch.equal(before, after)
    assert state.step == 5


def test_single_scalar_step():
    params = _scalar(1.0)
    new, state = optimizer_update(params, _scalar(0.5), AdamState.zeros_like(params), 0.1, 0.0)
    # bias-corrected moments equal g and g^2 on the first step
    assert float(new[0]) == pytest.approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8), abs=1e-12)
    assert float(state.exp_avg[0]) == pytest.approx(0.05)
    assert float(state.exp_avg_sq[0]) == pytest.approx(0.00025)


def test_decay_only():
    params = _scalar(2.0)
    new, _ = optimizer_update(params, _scalar(0.0), AdamState.zeros_like(params), 0.1, 0.5)
    assert float(new[0]) == pytest.approx(1.9, abs=1e-12)


def test_inputs_are_not_modified():
    params = _scalar(1.0)
    state = AdamState.zeros_like(params)
    optimizer_update(params, _scalar(0.3), state, 0.1, 0.05)
    assert float(params[0]) == 1.0
    assert state.step == 0 and float(state.exp_avg[0]) == 0.0


def test_shape_mismatch():
    params = [torch.zeros(3)]
    with pytest.raises(DimensionError):
        optimizer_update(params, [torch.zeros(4)], AdamState.zeros_like(params), 0.1, 0.0)


def test_length_mismatch():
    params = [torch.zeros(3)]
    with pytest.raises(DimensionError):
        optimizer_update(params, [torch.zeros(3), torch.zeros(3)], AdamState.zeros_like(params), 0.1, 0.0)


def test_matches_torch_adamw():
    gen = torch.Generator().manual_seed(0)
    start = torch.randn(6, 3, generator=gen, dtype=torch.float64)
    ours = torch.nn.Parameter(start.clone())
    reference = torch.nn.Parameter(start.clone())
    opt = AdamW([ours], lr=1e-2, weight_decay=0.05)
    ref_opt = torch.optim.AdamW([reference], lr=1e-2, betas=(0.9, 0.999), eps=1e-8, weight_decay=0.05)
    for _ in range(20):
        grad = torch.randn(6, 3, generator=gen, dtype=torch.float64)
        ours.grad = grad.clone()
        reference.grad = grad.clone()
        opt.step()
        ref_opt.step()
    torch.testing.assert_close(ours.detach(), reference.detach(), rtol=0, atol=1e-12)


def test_module_and_pure_forms_agree():
    gen = torch.Generator().manual_seed(1)
    start = torch.randn(4, generator=gen, dtype=torch.float64)
    param = torch.nn.Parameter(start.clone())
    opt = AdamW([param], lr=1e-3, weight_decay=0.05)
    pure, state = [start.clone()], AdamState.zeros_like([start])
    for _ in range(3):
        grad = torch.randn(4, generator=gen, dtype=torch.float64)
        param.grad = grad.clone()
        opt.step()
        pure, state = optimizer_update(pure, [grad], state, 1e-3, 0.05)
    assert torch.equal(param.detach(), pure[0])


def test_parameters_without_grad_are_skipped():
    param = torch.nn.Parameter(torch.ones(2))
    AdamW([param], lr=0.1, weight_decay=0.5).step()
    assert torch.equal(param.detach(), torch.ones(2))


@pytest.mark.parametrize("kwargs", [{"lr": 0.0}, {"weight_decay": -1.0}, {"betas": (0.9, 1.0)}])
def test_invalid_hyperparameters(kwargs):
    with pytest.raises(ConfigurationError):
        AdamW([torch.nn.Parameter(torch.zeros(1))], **kwargs)


def test_state_dict_round_trip():
    param = torch.nn.Parameter(torch.ones(3))
    opt = AdamW([param], lr=0.1)
    param.grad = torch.ones(3)
    opt.step()
    restored = AdamW([param], lr=0.1)
    restored.load_state_dict(opt.state_dict())
    assert restored.state[param]["step"] == 1
    assert torch.equal(restored.state[param]["exp_avg"], opt.state[param]["exp_avg"])


def test_grad_norm():
    a = torch.nn.Parameter(torch.zeros(2))
    b = torch.nn.Parameter(torch.zeros(1))
    a.grad = torch.tensor([3.0, 0.0])
    b.grad = torch.tensor([4.0])
    assert grad_norm([a, b]) == pytest.approx(5.0)
    assert grad_norm([torch.nn.Parameter(torch.zeros(1))]) == 0.0
