"""Time-modulated control of the 1-bit transmissive elements.

Each element carries its composite symbol A e^{j phi} on the first switching
harmonic: the element toggles between phase states e^{j0} and e^{j pi} once
per symbol period T_p, with the 0-state window of width tau starting at t_on.
The q-th harmonic of that square waveform is
(2/(pi q)) sin(pi q tau / T_p) e^{-j pi q (2 t_on + tau)/T_p}, so amplitude
maps through tau = (T_p/pi) asin(A/A_max) and phase through the window
position. Full-scale symbols keep |first harmonic|^2 = (2/pi)^2 of the input
power (the 3.92 dB modulation loss).
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_PERIOD = 0.3e-6  # symbol period T_p (s); results are T_p-invariant
FIRST_HARMONIC_GAIN = 2.0 / np.pi


@dataclass(frozen=True)
class CompositeSymbol:
    """Aggregate signal of one element: amplitude, phase in [-pi, pi) and the
    frame-level normalization amplitude ``a_max``."""

    amplitude: float
    phase: float
    a_max: float = None

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        if self.a_max is not None and self.amplitude > self.a_max * (1 + 1e-12):
            raise ValueError("amplitude exceeds a_max")


@dataclass(frozen=True)
class TmaWaveform:
    """Square-wave control parameters: 0-state onset ``t_on`` and width
    ``tau``, both in [0, T_p)."""

    t_on: float
    tau: float
    period: float = DEFAULT_PERIOD

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError("period must be > 0")
        if not 0 <= self.t_on < self.period:
            raise ValueError("t_on must lie in [0, T_p)")
        if not 0 <= self.tau < self.period:
            raise ValueError("tau must lie in [0, T_p)")


def compose_symbol(f_row, s, a_max=None) -> CompositeSymbol:
    """Aggregate one element's transmit sample x_n = F[n, :] @ s."""
    f_row = np.asarray(f_row, dtype=complex)
    s = np.asarray(s, dtype=complex)
    if f_row.shape != s.shape:
        raise ValueError("beamformer row and symbol vector lengths differ")
    x = complex(f_row @ s)
    amp = abs(x)
    phase = float(np.angle(x)) if amp > 0 else 0.0
    return CompositeSymbol(amplitude=amp, phase=phase, a_max=a_max)


def map_to_waveform(sym: CompositeSymbol, period=DEFAULT_PERIOD) -> TmaWaveform:
    """Invert the first-harmonic map: find (t_on, tau) whose +1 harmonic is
    (2/pi)(A/A_max) e^{j phi}.

    tau from the principal arcsin branch; t_on from
    -pi (2 t_on + tau)/T_p = phi + 2 k pi with the unique k placing t_on in
    [0, T_p). A = 0 maps to the all-pi waveform (tau = 0, t_on = 0).
    """
    if sym.a_max is None or not sym.a_max > 0:
        raise ValueError("a_max must be set and > 0")
    ratio = sym.amplitude / sym.a_max
    if ratio > 1 + 1e-12:
        raise ValueError("amplitude exceeds a_max")
    ratio = min(ratio, 1.0)
    if ratio == 0.0:
        return TmaWaveform(t_on=0.0, tau=0.0, period=period)
    tau = period / np.pi * np.arcsin(ratio)
    t_on = (-period * sym.phase / (2.0 * np.pi) - tau / 2.0) % period
    return TmaWaveform(t_on=float(t_on), tau=float(tau), period=period)


def waveform_phase(t, w: TmaWaveform) -> complex:
    """Instantaneous element phase factor, +1 (0-state) or -1 (1-state).

    Non-wrapping window: +1 on (t_on, t_on + tau]; wrapped window
    (t_on + tau > T_p): -1 on (t_on + tau - T_p, t_on], +1 elsewhere.
    """
    if not 0 <= t < w.period:
        raise ValueError("t must lie in [0, T_p)")
    if w.t_on + w.tau <= w.period:
        on = w.t_on < t <= w.t_on + w.tau
    else:
        on = not (w.t_on + w.tau - w.period < t <= w.t_on)
    return 1.0 + 0.0j if on else -1.0 + 0.0j


def sample_waveform(w: TmaWaveform, num_samples) -> np.ndarray:
    """Uniform samples s(m T_p / M), m = 0..M-1, as +/-1 complex values."""
    if num_samples < 1:
        raise ValueError("need at least one sample")
    t = np.arange(num_samples) * (w.period / num_samples)
    if w.t_on + w.tau <= w.period:
        on = (t > w.t_on) & (t <= w.t_on + w.tau)
    else:
        on = ~((t > w.t_on + w.tau - w.period) & (t <= w.t_on))
    return np.where(on, 1.0 + 0.0j, -1.0 + 0.0j)


def spectrum(f, w: TmaWaveform) -> complex:
    """Fourier transform of the phase control waveform at frequency f,
    (1/T_p) integral of s(t) e^{-j 2 pi f t} over one period.

    At f = 0 the closed form degenerates; the value there is the waveform's
    time average (2 tau / T_p - 1).
    """
    if f == 0:
        return complex(2.0 * w.tau / w.period - 1.0)
    tp = w.period
    if w.t_on + w.tau <= tp:
        alpha = _alpha(f, w.t_on, w.tau, tp)
        tail = 1j * (1.0 - np.exp(-2j * np.pi * f * tp)) / (2.0 * np.pi * f * tp)
    else:
        alpha = _alpha(f, w.t_on, w.tau - tp, tp)
        tail = 1j * (np.exp(-2j * np.pi * f * tp) - 1.0) / (2.0 * np.pi * f * tp)
    return complex(alpha + tail)


def _alpha(f, t_on, tau, tp):
    return (
        2.0
        / (np.pi * f * tp)
        * np.sin(np.pi * f * tau)
        * np.exp(-1j * np.pi * f * (2.0 * t_on + tau))
    )


def harmonic_peak(q, w: TmaWaveform) -> complex:
    """Peak of the q-th switching harmonic (q a nonzero integer):
    (2/(pi q)) sin(pi q tau / T_p) e^{-j pi q (2 t_on + tau)/T_p}."""
    if q == 0:
        raise ValueError("harmonic order must be nonzero")
    x = np.pi * q * w.tau / w.period
    return complex(
        2.0 / (np.pi * q)
        * np.sin(x)
        * np.exp(-1j * np.pi * q * (2.0 * w.t_on + w.tau) / w.period)
    )


def demodulate_first_harmonic(samples, sample_rate=None) -> complex:
    """Single-bin DFT at +1/T_p of one period of uniform samples, normalized
    so an ideal control waveform returns (approximately) harmonic_peak(1, w).

    ``sample_rate`` is informational (the period is spanned by the sample
    count); at least 16 samples per period are required.
    """
    samples = np.asarray(samples, dtype=complex)
    m = samples.size
    if m < 16:
        raise ValueError("need at least 16 samples per period")
    phase = np.exp(-2j * np.pi * np.arange(m) / m)
    return complex(samples @ phase / m)


def compose_frame(F, symbols):
    """Map a frame of user symbols through the beamformer.

    ``symbols`` is (K, T) (T symbol slots); returns (amplitudes, phases,
    a_max) with amplitudes/phases of shape (N, T) and a_max the frame-level
    normalization max_n,t |x_{n,t}|.
    """
    x = np.asarray(F) @ np.asarray(symbols, dtype=complex)
    amp = np.abs(x)
    phase = np.where(amp > 0, np.angle(x), 0.0)
    return amp, phase, float(amp.max())


def dump_waveform_csv(waveforms, path, samples_per_period=64):
    """Write control waveforms for inspection: one row per (element, sample)
    with columns element, t_over_Tp, state; state 0 is the e^{j0} window,
    state 1 the e^{j pi} complement."""
    lines = ["element,t_over_Tp,state"]
    for idx, w in enumerate(waveforms):
        vals = sample_waveform(w, samples_per_period).real
        for m, v in enumerate(vals):
            state = 0 if v > 0 else 1
            lines.append(f"{idx},{m / samples_per_period:.6f},{state}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
