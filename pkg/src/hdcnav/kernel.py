"""Synaptic weight-kernel synthesis for the ring network.

The recurrent kernel is obtained by regularized deconvolution of the
target tuning profile in the Fourier domain; the shift-layer kernels are
its spectral derivative scaled by the shift gain.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .neuron import NeuronParams, inverse_transfer

__all__ = [
    "TuningCurve",
    "WeightKernel",
    "target_profile",
    "synthesize_recurrent",
    "derivative_kernel",
    "build_kernel",
    "save_kernel",
    "load_kernel",
    "kernel_hash",
]

DEFAULT_LAMBDA = 25824.0

# Shift gain. Together with the calibration this sets the stimulus scale;
# 1.4 puts the stimuli for 10..44 deg/s well inside the transfer
# function's linear window.
DEFAULT_GAMMA = 1.4

# Margin keeping tuning-curve values inside the open domain of the
# inverse transfer function. The value also tunes the curvature of the
# stimulus-to-velocity law; 1.85e-6 keeps it within ~0.4% of linear over
# 10..44 deg/s.
_PEAK_MARGIN = 1.85e-6


def pinned_amplitude(a: float, m: float, r_max: float) -> float:
    """Amplitude that places the profile peak just below r_max."""
    return ((1.0 - _PEAK_MARGIN) * r_max - a) / math.exp(m)


@dataclass(frozen=True)
class TuningCurve:
    """Target firing-rate profile ``a + b * exp(m * cos(dtheta))``.

    ``b`` defaults to the value pinning the peak just below r_max so the
    whole profile stays inside the sigmoid's range.
    """

    a: float = 8.95
    m: float = 5.29
    n: int = 100
    b: float = field(default=None)
    r_max: float = 76.2

    def __post_init__(self):
        if self.n < 4:
            raise ValueError(f"need at least 4 neurons, got {self.n}")
        if self.b is None:
            object.__setattr__(self, "b", pinned_amplitude(self.a, self.m, self.r_max))
        peak = self.a + self.b * math.exp(self.m)
        if self.a <= 0.0 or peak >= self.r_max:
            raise ValueError("tuning curve must stay strictly inside (0, r_max)")

    @property
    def preferred_directions(self) -> np.ndarray:
        """Preferred directions theta_i = 2*pi*i/n [rad]."""
        return 2.0 * np.pi * np.arange(self.n) / self.n

    def evaluate(self, dtheta) -> np.ndarray:
        """Firing rate at angular offset ``dtheta`` from the peak."""
        return self.a + self.b * np.exp(self.m * np.cos(np.asarray(dtheta, dtype=float)))


@dataclass(frozen=True)
class WeightKernel:
    """Distance-indexed synaptic weight vectors of the three projections.

    Index ``d`` holds the weight between cells ``d`` steps apart
    (counterclockwise); index 0 is the self-distance and is skipped by the
    network when summing inputs.
    """

    h_to_h: np.ndarray
    h_to_s: np.ndarray
    s_to_h_left: np.ndarray
    s_to_h_right: np.ndarray
    gamma: float
    lam: float
    curve: TuningCurve

    @property
    def n(self) -> int:
        return len(self.h_to_h)

    def validate(self):
        """Assert the reflection symmetries the synthesis guarantees."""
        w, wp = self.h_to_h, self.s_to_h_left
        if not np.allclose(w[1:], w[1:][::-1], atol=1e-9):
            raise ValueError("recurrent kernel is not even under reflection")
        if not np.allclose(wp[1:], -wp[1:][::-1], atol=1e-9):
            raise ValueError("shift kernel is not odd under reflection")
        if not np.allclose(self.h_to_s, self.h_to_h / 2.0):
            raise ValueError("h_to_s must be half the recurrent kernel")
        if not np.allclose(self.s_to_h_right, -self.s_to_h_left):
            raise ValueError("s_to_h_right must be the negated left kernel")


def target_profile(curve: TuningCurve) -> np.ndarray:
    """Target firing rates sampled at the preferred directions."""
    return curve.evaluate(curve.preferred_directions)


def synthesize_recurrent(curve: TuningCurve, lam: float = DEFAULT_LAMBDA,
                         params: NeuronParams = NeuronParams()) -> np.ndarray:
    """Recurrent kernel from ridge-regularized Fourier deconvolution.

    Per discrete frequency k:  W_k = U_k * conj(F_k) / (lam + |F_k|^2),
    where F is the target profile and U its steady-state synaptic input.
    """
    f = target_profile(curve)
    lo, hi = _PEAK_MARGIN * params.r_max, (1.0 - _PEAK_MARGIN) * params.r_max
    u = inverse_transfer(np.clip(f, lo, hi), params)
    f_hat = np.fft.fft(f)
    u_hat = np.fft.fft(u)
    w_hat = u_hat * np.conj(f_hat) / (lam + np.abs(f_hat) ** 2)
    w = np.fft.ifft(w_hat)
    residue = np.max(np.abs(w.imag))
    if residue > 1e-9:
        raise ValueError(f"imaginary residue {residue:.3e} exceeds tolerance")
    return w.real


def derivative_kernel(w: np.ndarray) -> np.ndarray:
    """Spectral derivative of a ring kernel with respect to angle.

    Exact for band-limited signals; maps even kernels to odd ones and sums
    to zero. The Nyquist bin (even n) is zeroed, as usual for an odd
    derivative operator.
    """
    w = np.asarray(w, dtype=float)
    n = len(w)
    k = np.fft.fftfreq(n, d=1.0 / n)  # signed integer frequencies
    if n % 2 == 0:
        k[n // 2] = 0.0
    wp_hat = 1j * k * np.fft.fft(w)
    return np.fft.ifft(wp_hat).real


def build_kernel(curve: TuningCurve = TuningCurve(),
                 lam: float = DEFAULT_LAMBDA,
                 gamma: float = DEFAULT_GAMMA,
                 params: NeuronParams = NeuronParams()) -> WeightKernel:
    """Assemble all four weight vectors of the network.

    The shift-left kernel ``gamma * W'`` moves the activity peak
    counterclockwise (toward larger headings) when the shift-left layer is
    stimulated; the right kernel is its negation.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    w_hh = synthesize_recurrent(curve, lam, params)
    w_prime = derivative_kernel(w_hh)
    return WeightKernel(
        h_to_h=w_hh,
        h_to_s=w_hh / 2.0,
        s_to_h_left=gamma * w_prime,
        s_to_h_right=-gamma * w_prime,
        gamma=gamma,
        lam=lam,
        curve=curve,
    )


_KERNEL_FORMAT_VERSION = 1


def _kernel_document(kernel: WeightKernel) -> dict:
    return {
        "version": _KERNEL_FORMAT_VERSION,
        "n": kernel.n,
        "lambda": kernel.lam,
        "gamma": kernel.gamma,
        "curve": {"a": kernel.curve.a, "b": kernel.curve.b, "m": kernel.curve.m},
        "w_hh": kernel.h_to_h.tolist(),
        "w_hs": kernel.h_to_s.tolist(),
        "w_sh_left": kernel.s_to_h_left.tolist(),
        "w_sh_right": kernel.s_to_h_right.tolist(),
    }


def save_kernel(kernel: WeightKernel, path):
    """Write the kernel as a versioned JSON document."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_kernel_document(kernel), fh, indent=1)
        fh.write("\n")


def load_kernel(path) -> WeightKernel:
    """Read a kernel file written by :func:`save_kernel`."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("version") != _KERNEL_FORMAT_VERSION:
        raise ValueError(f"unsupported kernel file version: {doc.get('version')!r}")
    curve = TuningCurve(a=doc["curve"]["a"], m=doc["curve"]["m"],
                        n=doc["n"], b=doc["curve"]["b"])
    return WeightKernel(
        h_to_h=np.asarray(doc["w_hh"], dtype=float),
        h_to_s=np.asarray(doc["w_hs"], dtype=float),
        s_to_h_left=np.asarray(doc["w_sh_left"], dtype=float),
        s_to_h_right=np.asarray(doc["w_sh_right"], dtype=float),
        gamma=doc["gamma"],
        lam=doc["lambda"],
        curve=curve,
    )


def kernel_hash(kernel: WeightKernel) -> str:
    """Stable content hash used to pair calibrations with kernels."""
    payload = json.dumps(_kernel_document(kernel), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()
