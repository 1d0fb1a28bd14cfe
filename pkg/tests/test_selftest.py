import pytest

from cli.selftest import (
    GRADIENT_VARIANTS,
    check_hand_values,
    check_loss_oracles,
    check_no_leak,
    check_stopgrad,
    gradient_relative_error,
    stopgrad_trajectory,
)
from trainer import AugmentedPath


def test_loss_oracles():
    result = check_loss_oracles(instances=100)
    assert result.passed, result.detail


def test_hand_values():
    result = check_hand_values()
    assert result.passed, result.detail


@pytest.mark.parametrize("variant", GRADIENT_VARIANTS, ids=lambda v: v.value)
def test_float64_gradients(variant):
    assert gradient_relative_error(variant, float64=True) < 1e-4


def test_stopgrad_paths_agree():
    assert stopgrad_trajectory(AugmentedPath.NO_GRAD, steps=3) == stopgrad_trajectory(AugmentedPath.DETACHED, steps=3)


def test_stopgrad_check_passes():
    result = check_stopgrad()
    assert result.passed, result.detail


def test_broken_stopgrad_is_caught():
    result = check_stopgrad(broken=True)
    assert not result.passed
    assert "diverge" in result.detail


def test_no_leak():
    result = check_no_leak()
    assert result.passed, result.detail
