"""Density post-processing: lobe tracking, decay fits, and beat spectra.

Everything in this module consumes plain time series or grids of snapshot
fields and is agnostic about which engine produced them.  The observables
are the ones used throughout the package: the density at the three special
points x = 0, x = vt and x = 2vt, their power-law decay exponents, and the
Fourier spectrum of each trace with the A-E peak taxonomy

    A <-> f1 = gamma^2/(8 pi)         B <-> f3 = |v^2 - gamma^2|/(8 pi)
    C <-> f4 = |2 v^2 - gamma^2|/(8 pi)
    D, E <-> f2 = v^2/(8 pi)          (D for the d0 trace, E for d2v)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import find_peaks
from scipy.signal.windows import hann

from .analytic import WellParams, characteristic_frequencies

_LABEL_TO_FREQ = {"A": "f1", "B": "f3", "C": "f4", "D": "f2", "E": "f2"}


@dataclass(frozen=True)
class PeakTrace:
    """Densities |psi|^2 tracked at x = 0, vt, 2vt over time."""

    times: np.ndarray
    d0: np.ndarray
    dv: np.ndarray
    d2v: np.ndarray

    def __post_init__(self):
        for name in ("times", "d0", "dv", "d2v"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
        n = self.times.shape
        if not (self.d0.shape == self.dv.shape == self.d2v.shape == n):
            raise ValueError("trace components must have equal length")
        if self.times.ndim != 1 or self.times.size == 0:
            raise ValueError("times must be a nonempty 1-d sequence")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0.0):
            raise ValueError("times must be strictly increasing")
        for name in ("d0", "dv", "d2v"):
            if np.any(getattr(self, name) < 0.0):
                raise ValueError(f"{name} contains negative densities")


@dataclass(frozen=True)
class SpectrumResult:
    """One-sided magnitude spectrum of a density trace.

    ``freqs`` are ordinary frequencies (cycles per unit time) spaced by
    Delta f = 1/duration where duration = n_samples * sample_interval;
    ``mags`` are the magnitudes of the DFT of the mean-removed,
    Hann-windowed series.  ``component`` remembers which trace the series
    came from ("d0", "dv", "d2v") so the f2 peak can be labeled D or E;
    ``labels`` maps assigned peak letters to detected frequencies.
    """

    freqs: np.ndarray
    mags: np.ndarray
    labels: dict = field(default_factory=dict)
    component: str | None = None

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float)
        mags = np.asarray(self.mags, dtype=float)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "mags", mags)
        if freqs.shape != mags.shape or freqs.ndim != 1:
            raise ValueError("freqs and mags must be 1-d of equal length")
        if np.any(freqs < 0.0) or np.any(mags < 0.0):
            raise ValueError("freqs and mags must be nonnegative")
        df = np.diff(freqs)
        if freqs.size > 2 and not np.allclose(df, df[0], rtol=1e-9, atol=0.0):
            raise ValueError("freqs must be uniformly spaced")

    @property
    def df(self) -> float:
        """Frequency resolution (bin spacing)."""
        if self.freqs.size < 2:
            raise ValueError("spectrum has fewer than two bins")
        return float(self.freqs[1] - self.freqs[0])


def track_peaks(trajectory, p: WellParams) -> PeakTrace:
    """Sample |psi|^2 at x = 0, vt, 2vt from a sequence of snapshot fields.

    Each snapshot is cubic-spline interpolated on its own grid, so the
    tracked points need not coincide with grid nodes.  All three points
    must lie inside every snapshot's domain.  Interpolating a density near
    the bound-state kink can undershoot zero by round-off; values are
    clipped at zero to keep the trace a valid density.
    """
    times, rows = [], []
    for snap in trajectory:
        x = snap.grid.x
        pts = np.array([0.0, p.v * snap.t, 2.0 * p.v * snap.t])
        if pts.min() < x[0] or pts.max() > x[-1]:
            raise ValueError(
                f"tracked points {pts.tolist()} leave the grid "
                f"[{x[0]:g}, {x[-1]:g}] at t={snap.t:g}")
        dens = CubicSpline(x, np.abs(snap.values) ** 2)
        times.append(snap.t)
        rows.append(np.maximum(dens(pts), 0.0))
    rows = np.array(rows)
    return PeakTrace(times=np.array(times), d0=rows[:, 0], dv=rows[:, 1],
                     d2v=rows[:, 2])


def fit_power_law(times, values, window, *, envelope: bool = False):
    """Least-squares exponent of value ~ t^alpha inside a time window.

    Returns ``(exponent, r_squared)`` from a straight-line fit of
    log(value) against log(t).  With ``envelope=True`` only interior local
    maxima inside the window are fitted, which removes the bias that
    superimposed beats put on a log-log slope; if the windowed series has
    fewer than 8 such maxima (a monotone trace) the plain fit is used.

    Raises ValueError if the window holds fewer than 8 samples or any
    windowed value is not strictly positive.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    t_lo, t_hi = (float(w) for w in window)
    mask = (t >= t_lo) & (t <= t_hi)
    t, y = t[mask], y[mask]
    if t.size < 8:
        raise ValueError(
            f"power-law fit needs >= 8 samples in [{t_lo:g}, {t_hi:g}], "
            f"got {t.size}")
    if np.any(y <= 0.0) or np.any(t <= 0.0):
        raise ValueError("power-law fit requires positive times and values")
    if envelope:
        idx, _ = find_peaks(y)
        if idx.size >= 8:
            t, y = t[idx], y[idx]
    log_t, log_y = np.log(t), np.log(y)
    slope, intercept = np.polyfit(log_t, log_y, 1)
    resid = log_y - (slope * log_t + intercept)
    ss_tot = float(np.sum((log_y - log_y.mean()) ** 2))
    r_sq = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return float(slope), r_sq


def spectrum(times, values, *, p: WellParams | None = None,
             component: str | None = None) -> SpectrumResult:
    """Magnitude spectrum of a uniformly sampled density trace.

    The series is mean-removed, multiplied by a periodic Hann window, and
    transformed with a real FFT; ``freqs`` is the one-sided ordinary-
    frequency axis with resolution 1/(n*dt).  When well parameters are
    supplied, the sampling rate must exceed twice the fastest density
    beat f4 (anti-aliasing guard).

    Raises ValueError on non-uniform sampling, fewer than 64 samples, a
    violated aliasing guard, or an unknown ``component`` tag.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.shape != y.shape:
        raise ValueError("times and values must be 1-d of equal length")
    if t.size < 64:
        raise ValueError(f"spectrum needs >= 64 samples, got {t.size}")
    steps = np.diff(t)
    dt_s = float(steps[0])
    if dt_s <= 0.0 or not np.allclose(steps, dt_s, rtol=1e-9,
                                      atol=1e-12 * abs(dt_s)):
        raise ValueError("spectrum requires uniform time sampling")
    if component not in (None, "d0", "dv", "d2v"):
        raise ValueError(f"unknown trace component {component!r}")
    if p is not None:
        f4 = characteristic_frequencies(p).f4
        rate = 1.0 / dt_s
        if rate <= 2.0 * f4:
            raise ValueError(
                f"sampling rate {rate:g} does not exceed 2*f4={2*f4:g}; "
                "the density beats would alias")
    windowed = (y - y.mean()) * hann(t.size, sym=False)
    mags = np.abs(np.fft.rfft(windowed))
    freqs = np.fft.rfftfreq(t.size, d=dt_s)
    return SpectrumResult(freqs=freqs, mags=mags, component=component)


def _assign_labels(cand_freqs, cand_mags, targets: dict, df: float) -> dict:
    """Match candidate maxima to target frequencies within +-2*bin.

    Deterministic in the candidate *set*: for each target the strongest
    candidate wins, with the lower frequency breaking exact magnitude
    ties, so shuffling the candidate order cannot change the result.
    Targets indistinguishable from DC (below 2 df) are reported as merged
    with the zero bin.
    """
    cand_freqs = np.asarray(cand_freqs, dtype=float)
    cand_mags = np.asarray(cand_mags, dtype=float)
    order = np.lexsort((cand_freqs, -cand_mags))
    labels = {}
    for name, f_target in targets.items():
        if f_target < 2.0 * df:
            labels[name] = 0.0
            continue
        for i in order:
            if abs(cand_freqs[i] - f_target) <= 2.0 * df:
                labels[name] = float(cand_freqs[i])
                break
    return labels


def identify_spectral_peaks(s: SpectrumResult, p: WellParams, *,
                            min_prominence: float = 0.05) -> dict:
    """Label the spectrum's maxima with the A-E taxonomy.

    Local maxima with prominence at least ``min_prominence`` times the
    largest magnitude are matched to the characteristic frequencies within
    +-2 bins: A to f1, B to f3, C to f4, and the f2 match is labeled D for
    a d0 trace, E for a d2v trace, or both for a trace of unknown origin.
    Expected peaks with no match are absent from the returned mapping;
    targets that fall below twice the resolution are reported as 0.0
    (merged with the DC bin, which mean removal empties).

    Raises ValueError when the bin spacing is coarser than a quarter of
    the smallest nonzero gap among {f1, f2, f3, f4}.
    """
    f = characteristic_frequencies(p)
    df = s.df
    values = [f.f1, f.f2, f.f3, f.f4]
    gaps = [abs(a - b) for i, a in enumerate(values) for b in values[i + 1:]]
    gaps = [g for g in gaps if g > 0.0]
    if gaps and df > min(gaps) / 4.0:
        raise ValueError(
            f"resolution {df:g} too coarse to separate the characteristic "
            f"frequencies (min nonzero gap {min(gaps):g})")

    targets = {"A": f.f1, "B": f.f3, "C": f.f4}
    if s.component in (None, "d0"):
        targets["D"] = f.f2
    if s.component in (None, "d2v"):
        targets["E"] = f.f2
    idx, _ = find_peaks(s.mags, prominence=min_prominence * s.mags.max())
    return _assign_labels(s.freqs[idx], s.mags[idx], targets, df)
