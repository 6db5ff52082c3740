"""Three-layer ring attractor: one heading layer and two shift layers.

The layers are advanced together with a single block connectivity matrix,
which keeps the per-step cost at one matrix-vector product plus one
transfer-function evaluation. Self-connections (cell distance 0) carry no
weight.
"""

import json
from dataclasses import dataclass

import numpy as np

from .kernel import WeightKernel
from .neuron import NeuronParams

__all__ = ["NetworkState", "TurningStimulus", "HDCNetwork", "decode",
           "DegenerateActivityError"]

SETTLE_SECONDS = 0.5     # 25 tau: relaxation residual below 1e-10
DEFAULT_DT = 0.0005      # Euler step [s]

# Fraction of n * r_max below which the population vector is considered
# directionless.
_DECODE_MAGNITUDE_FRACTION = 0.01


class DegenerateActivityError(ValueError):
    """Raised when the activity profile carries no direction information."""


@dataclass(frozen=True)
class TurningStimulus:
    """Uniform input currents injected into the two shift layers."""

    left: float = 0.0
    right: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.left) and np.isfinite(self.right)):
            raise ValueError("stimulus values must be finite")
        if self.left < 0.0 or self.right < 0.0:
            raise ValueError("stimulus values must be non-negative")


ZERO_STIMULUS = TurningStimulus(0.0, 0.0)


@dataclass
class NetworkState:
    """Firing rates of all three layers at one instant."""

    hdc_rates: np.ndarray
    shift_left_rates: np.ndarray
    shift_right_rates: np.ndarray
    sim_time: float = 0.0

    def to_json(self, path):
        doc = {
            "sim_time": self.sim_time,
            "hdc_rates": self.hdc_rates.tolist(),
            "shift_left_rates": self.shift_left_rates.tolist(),
            "shift_right_rates": self.shift_right_rates.tolist(),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")


def _distance_matrix(n: int) -> np.ndarray:
    # d(i, j) = (j - i) mod n
    idx = np.arange(n)
    return (idx[None, :] - idx[:, None]) % n


def _projection(weights: np.ndarray) -> np.ndarray:
    """n x n connectivity from a distance-indexed kernel, diagonal zeroed."""
    n = len(weights)
    mat = weights[_distance_matrix(n)]
    np.fill_diagonal(mat, 0.0)
    return mat


def decode(state: NetworkState, params: NeuronParams = NeuronParams()) -> float:
    """Population-vector heading of the HDC layer, in [0, 2*pi)."""
    f = state.hdc_rates
    n = len(f)
    theta = 2.0 * np.pi * np.arange(n) / n
    s = float(np.dot(f, np.sin(theta)))
    c = float(np.dot(f, np.cos(theta)))
    magnitude = np.hypot(s, c)
    if magnitude <= _DECODE_MAGNITUDE_FRACTION * n * params.r_max:
        raise DegenerateActivityError(
            f"population vector magnitude {magnitude:.3g} too small to decode")
    return float(np.arctan2(s, c) % (2.0 * np.pi))


class HDCNetwork:
    """Stateful simulator of the heading network.

    Instances are single-threaded; the kernel they are built from is
    immutable and may be shared.
    """

    def __init__(self, kernel: WeightKernel, params: NeuronParams = NeuronParams(),
                 dt: float = DEFAULT_DT):
        kernel.validate()
        if not 0.0 < dt <= params.max_dt:
            raise ValueError(f"dt must be in (0, {params.max_dt}], got {dt}")
        self.kernel = kernel
        self.params = params
        self.dt = dt
        n = kernel.n
        self.n = n
        # Block connectivity over the stacked state [hdc, shift_l, shift_r].
        block = np.zeros((3 * n, 3 * n))
        block[:n, :n] = _projection(kernel.h_to_h)
        block[:n, n:2 * n] = _projection(kernel.s_to_h_left)
        block[:n, 2 * n:] = _projection(kernel.s_to_h_right)
        block[n:2 * n, :n] = _projection(kernel.h_to_s)
        block[2 * n:, :n] = _projection(kernel.h_to_s)
        self._block = block
        self._rates = np.zeros(3 * n)
        self._stim = np.zeros(3 * n)
        self.sim_time = 0.0

    # -- state access ---------------------------------------------------

    @property
    def state(self) -> NetworkState:
        n = self.n
        return NetworkState(
            hdc_rates=self._rates[:n].copy(),
            shift_left_rates=self._rates[n:2 * n].copy(),
            shift_right_rates=self._rates[2 * n:].copy(),
            sim_time=self.sim_time,
        )

    def set_state(self, state: NetworkState):
        n = self.n
        self._rates[:n] = state.hdc_rates
        self._rates[n:2 * n] = state.shift_left_rates
        self._rates[2 * n:] = state.shift_right_rates
        self.sim_time = state.sim_time

    def decode(self) -> float:
        return decode(self.state, self.params)

    # -- dynamics -------------------------------------------------------

    def init_at(self, heading: float):
        """Place the activity bump at ``heading`` and let it settle.

        The heading layer starts on the closed-form tuning profile rotated
        to the requested direction, the shift layers on half of it; a
        0.5 s zero-stimulus relaxation then brings all layers onto the
        attractor.
        """
        if not np.isfinite(heading):
            raise ValueError("heading must be finite")
        curve = self.kernel.curve
        profile = curve.evaluate(curve.preferred_directions - heading)
        n = self.n
        self._rates[:n] = profile
        self._rates[n:2 * n] = profile / 2.0
        self._rates[2 * n:] = profile / 2.0
        self.sim_time = 0.0
        self.run_frame(ZERO_STIMULUS, SETTLE_SECONDS)
        self.sim_time = 0.0

    def step(self, stim: TurningStimulus = ZERO_STIMULUS, dt: float = None):
        """Advance all three layers by one Euler step."""
        if dt is None:
            dt = self.dt
        self._set_stimulus(stim)
        self._step_inner(dt)
        self.sim_time += dt

    def run_frame(self, stim: TurningStimulus, frame_dt: float):
        """Hold ``stim`` constant for ``frame_dt`` seconds of Euler steps."""
        if frame_dt < self.dt:
            raise ValueError(f"frame_dt {frame_dt} shorter than one Euler step {self.dt}")
        n_steps = int(np.ceil(frame_dt / self.dt - 1e-9))
        self._set_stimulus(stim)
        for _ in range(n_steps):
            self._step_inner(self.dt)
        self.sim_time += frame_dt

    def _set_stimulus(self, stim: TurningStimulus):
        n = self.n
        self._stim[n:2 * n] = stim.left
        self._stim[2 * n:] = stim.right

    def _step_inner(self, dt: float):
        p = self.params
        inputs = self._block @ self._rates + self._stim
        phi = p.r_max / (1.0 + np.exp(-p.beta * (inputs - p.h0)))
        self._rates += (dt / p.tau) * (phi - self._rates)
