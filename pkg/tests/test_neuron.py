import math

import numpy as np
import pytest
import torch

from src.core.errors import NonFiniteError
from src.neuron import LIFState, lif_run, lif_step, readout_integrate, softspike, spike_fn
from src.neuron import surrogate


class TestLIFStep:
    def test_spike_and_reset(self):
        state, spikes = lif_step(LIFState(torch.tensor([0.0])), torch.tensor([1.5]), 0.33, 1.0)
        assert spikes.item() == 1.0
        assert state.U.item() == 0.0

    def test_leak_without_input(self):
        state, spikes = lif_step(LIFState(torch.tensor([0.9])), torch.tensor([0.0]), 0.33, 1.0)
        assert spikes.item() == 0.0
        assert state.U.item() == pytest.approx(0.297)

    def test_threshold_is_inclusive(self):
        _, spikes = lif_step(LIFState(torch.tensor([0.0])), torch.tensor([1.0]), 0.5, 1.0)
        assert spikes.item() == 1.0

    def test_quiescent_without_input(self):
        spikes, state = lif_run(torch.zeros(20, 4), 0.9, 1.0)
        assert spikes.sum().item() == 0
        assert torch.count_nonzero(state.U).item() == 0

    def test_non_finite_current_reports_index(self):
        with pytest.raises(NonFiniteError) as info:
            lif_step(LIFState.zeros(3), torch.tensor([0.0, float("nan"), 1.0]), 0.5, 1.0)
        assert info.value.index == 1

    def test_run_matches_manual_recurrence(self):
        currents = torch.tensor([[0.6], [0.6], [0.0], [1.2]], dtype=torch.float64)
        spikes, _ = lif_run(currents, 0.5, 1.0)
        # U: 0.6, 0.9, 0.45, 1.425 -> spike
        np.testing.assert_array_equal(spikes[:, 0].numpy(), [0, 0, 0, 1])

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            spike_fn(torch.zeros(2), 5.0, "leaky")


class TestSoftSpike:
    def test_value_and_slope_at_zero(self):
        u = torch.tensor(0.0, dtype=torch.float64, requires_grad=True)
        out = spike_fn(u, 4.0, "soft")
        out.backward()
        assert out.item() == pytest.approx(0.5)
        assert u.grad.item() == pytest.approx(2.0)

    def test_limits(self):
        values = softspike(torch.tensor([-1e6, 1e6], dtype=torch.float64), 5.0)
        np.testing.assert_allclose(values.numpy(), [0.0, 1.0], atol=1e-6)
        assert 0.0 < values[0].item() < values[1].item() < 1.0

    def test_backward_matches_finite_difference(self):
        a, u0, eps = 5.0, 0.1, 1e-6
        u = torch.tensor(u0, dtype=torch.float64, requires_grad=True)
        spike_fn(u, a, "soft").backward()
        numeric = (softspike(torch.tensor(u0 + eps, dtype=torch.float64), a)
                   - softspike(torch.tensor(u0 - eps, dtype=torch.float64), a)) / (2 * eps)
        assert abs(u.grad.item() - numeric.item()) < 1e-6

    def test_hard_forward_is_heaviside(self):
        out = spike_fn(torch.tensor([-0.1, 0.0, 0.3]), 5.0, "hard")
        np.testing.assert_array_equal(out.numpy(), [0.0, 1.0, 1.0])

    @pytest.mark.parametrize("mode", ["hard", "soft"])
    def test_both_modes_share_one_backward(self, monkeypatch, mode):
        monkeypatch.setattr(surrogate, "atan_surrogate_grad", lambda u, a: torch.full_like(u, 7.0))
        u = torch.tensor([0.3, -2.0], dtype=torch.float64, requires_grad=True)
        spike_fn(u, 5.0, mode).sum().backward()
        np.testing.assert_array_equal(u.grad.numpy(), [7.0, 7.0])

    def test_hard_and_soft_gradients_coincide(self):
        grads = []
        for mode in ("hard", "soft"):
            u = torch.linspace(-1, 1, 9, dtype=torch.float64, requires_grad=True)
            spike_fn(u, 3.0, mode).sum().backward()
            grads.append(u.grad)
        torch.testing.assert_close(grads[0], grads[1])
        expected = 3.0 / (2 * (1 + (math.pi / 2 * 3.0 * torch.linspace(-1, 1, 9, dtype=torch.float64)) ** 2))
        torch.testing.assert_close(grads[0], expected)


class TestSoftBPTT:
    def test_gradient_through_time_matches_finite_difference(self, numeric_grad, rel_err):
        gen = torch.Generator().manual_seed(11)
        currents = torch.rand(8, 3, generator=gen, dtype=torch.float64) * 1.5
        weights = torch.randn(8, 3, generator=gen, dtype=torch.float64)

        def loss():
            spikes, _ = lif_run(currents, 0.8, 1.0, mode="soft", slope=2.0)
            return (spikes * weights).sum()

        currents.requires_grad_(True)
        loss().backward()
        analytic = currents.grad.clone()
        with torch.no_grad():
            numeric = numeric_grad(loss, currents)
        assert rel_err(analytic, numeric) < 1e-4


class TestReadout:
    def test_constant_input_converges(self):
        trace, _ = readout_integrate(torch.full((200, 2), 0.7, dtype=torch.float64), 0.5)
        np.testing.assert_allclose(trace[-1].numpy(), [1.4, 1.4])

    def test_pulse_response(self):
        currents = torch.zeros(3, 1, dtype=torch.float64)
        currents[0, 0] = 2.0
        trace, logits = readout_integrate(currents, 0.33)
        np.testing.assert_allclose(trace[:, 0].numpy(), [2.0, 0.66, 0.2178])
        assert logits.item() == pytest.approx((2.0 + 0.66 + 0.2178) / 3)

    def test_reductions(self):
        currents = torch.tensor([[1.0], [-3.0]], dtype=torch.float64)
        assert readout_integrate(currents, 0.5, "sum")[1].item() == pytest.approx(1.0 - 2.5)
        assert readout_integrate(currents, 0.5, "max")[1].item() == pytest.approx(1.0)
        with pytest.raises(ValueError):
            readout_integrate(currents, 0.5, "median")
