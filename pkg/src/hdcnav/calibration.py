"""Empirical calibration of the stimulus-to-angular-velocity gain.

A sweep drives the shift-left layer at a range of constant stimulus
levels and measures the steady drift speed of the activity bump; a
least-squares line through the origin is then inverted to obtain the
stimulus gain used by the tracker.
"""

import json
from dataclasses import dataclass

import numpy as np

from .kernel import WeightKernel, kernel_hash
from .network import DegenerateActivityError, HDCNetwork, TurningStimulus
from .neuron import NeuronParams

__all__ = ["StimulusGain", "SweepSample", "sweep", "fit_gain",
           "save_calibration", "load_calibration", "CalibrationMismatchError",
           "GainFitError", "DEFAULT_STIMULI"]

# Default sweep levels; with the default kernel these map to roughly
# 10..44 deg/s of bump velocity, covering the 40 deg/s validated range.
DEFAULT_STIMULI = (0.01533, 0.023, 0.03067, 0.03833, 0.046,
                   0.05367, 0.06134, 0.06747)

SWEEP_DURATION = 4.0        # seconds per level
SWEEP_FRAME_DT = 0.01       # decode sampling interval [s]

# Residual bound deciding which swept velocities count as "linear".
_LINEAR_RESIDUAL_FRACTION = 0.05

_MIN_FIT_R2 = 0.99
_MIN_FIT_SAMPLES = 5


class GainFitError(RuntimeError):
    """Raised when the sweep data does not follow a linear law."""


class CalibrationMismatchError(RuntimeError):
    """Raised when a calibration is paired with a different kernel."""


@dataclass(frozen=True)
class SweepSample:
    stimulus: float
    velocity: float       # measured bump velocity [rad/s]; NaN if degenerate
    degenerate: bool = False


@dataclass(frozen=True)
class StimulusGain:
    """Inverted linear law: stimulus = alpha * |angular velocity|."""

    alpha: float
    fit_r2: float
    max_velocity: float   # largest validated angular speed [rad/s]
    gamma: float
    kernel_hash: str

    def stimulus_for(self, omega: float) -> float:
        return self.alpha * abs(omega)


def measure_drift_velocity(net: HDCNetwork, stimulus: TurningStimulus,
                           duration: float = SWEEP_DURATION,
                           frame_dt: float = SWEEP_FRAME_DT) -> float:
    """Steady bump velocity [rad/s] under a constant stimulus.

    The first half of the run is discarded as transient; the slope of the
    unwrapped decoded heading over the second half is returned.
    """
    headings = [net.decode()]
    times = [0.0]
    n_frames = int(round(duration / frame_dt))
    for i in range(n_frames):
        net.run_frame(stimulus, frame_dt)
        headings.append(net.decode())
        times.append((i + 1) * frame_dt)
    headings = np.unwrap(np.asarray(headings))
    times = np.asarray(times)
    half = len(times) // 2
    slope, _ = np.polyfit(times[half:], headings[half:], 1)
    return float(slope)


def sweep(kernel: WeightKernel, stimuli=DEFAULT_STIMULI,
          duration: float = SWEEP_DURATION,
          params: NeuronParams = NeuronParams()) -> list:
    """Measure bump velocity for each stimulus level on the shift-left layer.

    Levels at which the bump collapses are reported as degenerate samples
    and later excluded from the fit.
    """
    stimuli = list(stimuli)
    if any(s < 0 for s in stimuli):
        raise ValueError("stimulus levels must be non-negative")
    if sorted(stimuli) != stimuli:
        raise ValueError("stimulus levels must be ascending")
    if duration < 2.0:
        raise ValueError("sweep duration must be at least 2 s")
    samples = []
    for level in stimuli:
        net = HDCNetwork(kernel, params)
        net.init_at(np.pi)
        try:
            v = measure_drift_velocity(net, TurningStimulus(left=level), duration)
            samples.append(SweepSample(stimulus=level, velocity=v))
        except DegenerateActivityError:
            samples.append(SweepSample(stimulus=level, velocity=float("nan"),
                                       degenerate=True))
    return samples


def fit_gain(samples, kernel: WeightKernel = None,
             gamma: float = None) -> StimulusGain:
    """Least-squares line through the origin, inverted to a stimulus gain.

    ``samples`` may be SweepSample objects or (stimulus, velocity) pairs.
    Degenerate levels are excluded; a fit with R^2 below 0.99 is rejected
    since it indicates a mis-built kernel or flipped sign convention.
    """
    pairs = []
    for sample in samples:
        if isinstance(sample, SweepSample):
            if sample.degenerate:
                continue
            pairs.append((sample.stimulus, sample.velocity))
        else:
            pairs.append((float(sample[0]), float(sample[1])))
    pairs = [(s, v) for s, v in pairs if s > 0 and np.isfinite(v)]
    if len(pairs) < _MIN_FIT_SAMPLES:
        raise GainFitError(f"need at least {_MIN_FIT_SAMPLES} usable samples, "
                           f"got {len(pairs)}")
    s = np.array([p[0] for p in pairs])
    v = np.array([p[1] for p in pairs])
    slope = float(np.dot(s, v) / np.dot(s, s))
    if slope <= 0:
        raise GainFitError(f"non-positive velocity/stimulus slope {slope:.4g}")
    residuals = v - slope * s
    ss_tot = float(np.sum((v - v.mean()) ** 2))
    r2 = 1.0 - float(np.sum(residuals ** 2)) / ss_tot if ss_tot > 0 else 1.0
    if r2 < _MIN_FIT_R2:
        raise GainFitError(f"sweep is not linear: R^2 = {r2:.4f} < {_MIN_FIT_R2}")
    within = np.abs(residuals) < _LINEAR_RESIDUAL_FRACTION * np.abs(v)
    max_velocity = float(np.max(np.abs(v[within]))) if np.any(within) else 0.0
    return StimulusGain(
        alpha=1.0 / slope,
        fit_r2=r2,
        max_velocity=max_velocity,
        gamma=kernel.gamma if kernel is not None else gamma,
        kernel_hash=kernel_hash(kernel) if kernel is not None else "",
    )


def save_calibration(gain: StimulusGain, path):
    doc = {
        "alpha": gain.alpha,
        "fit_r2": gain.fit_r2,
        "max_velocity": gain.max_velocity,
        "gamma": gain.gamma,
        "kernel_hash": gain.kernel_hash,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_calibration(path, kernel: WeightKernel = None) -> StimulusGain:
    """Load a calibration file, refusing one built for a different kernel."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    gain = StimulusGain(alpha=doc["alpha"], fit_r2=doc["fit_r2"],
                        max_velocity=doc["max_velocity"], gamma=doc["gamma"],
                        kernel_hash=doc["kernel_hash"])
    if kernel is not None and gain.kernel_hash != kernel_hash(kernel):
        raise CalibrationMismatchError(
            "calibration was produced for a different kernel "
            f"(hash {gain.kernel_hash[:12]}... vs {kernel_hash(kernel)[:12]}...)")
    return gain
