"""Closed-form dynamics of a particle bound to a suddenly moving delta well.

A particle sits in the single bound state of an attractive delta well
-gamma*delta(x).  At t = 0 the well abruptly starts sliding at constant
velocity v.  In units hbar = 2m = 1 everything that follows -- the exact
wavefunction, the propagator of the moving well, the survival probability
of the bound state, and the large-time three-lobe structure of the density
-- is expressible through the Moshinsky function, and this module collects
those expressions together with an independent quadrature route used to
validate them.

Conventions
-----------
* Units hbar = 2m = 1; the Schroedinger equation reads
  i dpsi/dt = -psi_xx + V psi, and the well binding energy is -gamma**2/4.
* All half-integer powers of i use the numpy principal branch; this fixes
  the phase of the free propagator and of the asymptotic lobes

* The Moshinsky wavenumber in the moving-well propagator is +i*gamma/2 and
  its time argument is 2*(t - t_src); both choices are validated by the
  eigenstate-propagation checks in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from ._quadrature import (
    complex_quad_gk,
    damped_halfline_quad,
    ray_quad,
    segment_quad,
)
from .specfun import _cexp, _w_upper, moshinsky

_ROT = np.exp(0.25j * np.pi)  # e^{i pi/4}: descent direction for exp(i z^2)


# ---------------------------------------------------------------------------
# parameter containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WellParams:
    """Attractive delta well of strength gamma moving at velocity v.

    ``gamma`` must be positive (the repulsive case has no bound state and
    is out of scope).  ``v`` may carry either sign: the physics is mirror
    symmetric under (v, x) -> (-v, -x) and the formulas hold verbatim, so
    no sign restriction is imposed even though forward motion is the
    canonical setup.
    """

    gamma: float
    v: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "v", float(self.v))
        if not (math.isfinite(self.gamma) and self.gamma > 0.0):
            raise ValueError(f"gamma must be finite and > 0, got {self.gamma!r}")
        if not math.isfinite(self.v):
            raise ValueError(f"v must be finite, got {self.v!r}")

    @property
    def massey(self) -> float:
        """Adiabaticity ratio v/gamma (see :func:`massey_parameter`)."""
        return self.v / self.gamma


@dataclass(frozen=True)
class IdentityCase:
    """One instance of the half-line Moshinsky integral identity.

    The identity couples a damped plane wave exp(i*k*x') to the Moshinsky
    function M(|x| + |x'|, -i*v0, t) over x' in (-inf, 0] and has the
    closed form [M(|x|, k, t) - M(|x|, -i*v0, t)] / (v0 - i*k).
    """

    k: complex
    v0: complex
    t: float
    x: float

    def __post_init__(self):
        object.__setattr__(self, "k", complex(self.k))
        object.__setattr__(self, "v0", complex(self.v0))
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", float(self.x))
        vals = (self.k.real, self.k.imag, self.v0.real, self.v0.imag,
                self.t, self.x)
        if not all(math.isfinite(u) for u in vals):
            raise ValueError("IdentityCase requires finite parameters")
        if not self.t > 0.0:
            raise ValueError(f"IdentityCase requires t > 0, got t={self.t!r}")
        if abs(self.v0 - 1j * self.k) <= 1e-12 * (1.0 + abs(self.v0)):
            raise ValueError(
                "IdentityCase with v0 = i*k is rejected: the closed-form "
                "denominator v0 - i*k vanishes")


class Frequencies(NamedTuple):
    """The four characteristic density-beat frequencies, cycles/unit time."""

    f1: float
    f2: float
    f3: float
    f4: float


class AsymptoticTerms(NamedTuple):
    """Large-time decomposition: lobe at x=0, at x=vt, and at x=2vt."""

    free: np.ndarray
    well: np.ndarray
    double_velocity: np.ndarray


def _check_time(t, *, positive=True, name="t"):
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"{name} must be finite, got {t!r}")
    if positive and t <= 0.0:
        raise ValueError(f"{name} must be > 0, got {t!r}")
    if not positive and t < 0.0:
        raise ValueError(f"{name} must be >= 0, got {t!r}")
    return t


# ---------------------------------------------------------------------------
# elementary closed forms
# ---------------------------------------------------------------------------

def initial_bound_state(x, p: WellParams):
    """Bound state sqrt(gamma/2)*exp(-gamma*|x|/2) of the well at rest.

    Real, positive, and L2-normalized; this is the t <= 0 state of every
    evolution in the package.
    """
    x = np.asarray(x, dtype=float)
    val = np.sqrt(0.5 * p.gamma) * np.exp(-0.5 * p.gamma * np.abs(x))
    return float(val) if val.ndim == 0 else val


def moving_bound_eigenstate(x, t, p: WellParams):
    """Bound state dragged rigidly by the moving well.

    psi_b(x, t) = sqrt(gamma/2) * exp(i(gamma^2 - v^2)t/4) * exp(i v x / 2)
    * exp(-gamma|x - vt|/2).  Its density is the rest-frame bound-state
    profile translated to the instantaneous well position x = v t.
    """
    t = _check_time(t, positive=False)
    x = np.asarray(x, dtype=float)
    phase = np.exp(0.25j * (p.gamma**2 - p.v**2) * t + 0.5j * p.v * x)
    val = np.sqrt(0.5 * p.gamma) * phase * np.exp(
        -0.5 * p.gamma * np.abs(x - p.v * t))
    return complex(val) if val.ndim == 0 else val


def survival_probability(p: WellParams) -> float:
    """Long-time probability of staying bound: 16 / (4 + theta^2)^2.

    theta = v/gamma is the Massey parameter.  The value equals the squared
    overlap between the initial state and the moving-well bound state at
    t = 0 (see :func:`survival_overlap_quadrature` for the independent
    numerical check).
    """
    th = p.massey
    return 16.0 / (4.0 + th * th) ** 2


def massey_parameter(p: WellParams) -> float:
    """Adiabaticity parameter theta = v/gamma."""
    return p.v / p.gamma


def characteristic_frequencies(p: WellParams) -> Frequencies:
    """Beat frequencies visible in the density at the three tracked points.

    f1 = gamma^2/8pi is the bound-state frequency, f2 = v^2/8pi the kinetic
    frequency of the dragged state, and f3 = |f2 - f1|, f4 = |2 f2 - f1|
    arise as cross terms between the lobes.  Ordinary frequencies, i.e.
    cycles per unit time.
    """
    f1 = p.gamma**2 / (8.0 * np.pi)
    f2 = p.v**2 / (8.0 * np.pi)
    f3 = abs(p.v**2 - p.gamma**2) / (8.0 * np.pi)
    f4 = abs(2.0 * p.v**2 - p.gamma**2) / (8.0 * np.pi)
    return Frequencies(f1, f2, f3, f4)


def free_propagator(x, t, x_src=0.0, t_src=0.0):
    """Free-particle kernel K0(x, t | x_src, t_src) for t > t_src >= 0.

    K0 = (4 pi i dt)^(-1/2) exp(i (x - x_src)^2 / (4 dt)) on the principal
    square-root branch.
    """
    t = _check_time(t, positive=False)
    t_src = _check_time(t_src, positive=False, name="t_src")
    dt = t - t_src
    if dt <= 0.0:
        raise ValueError(f"free_propagator requires t > t_src, got dt={dt!r}")
    x = np.asarray(x, dtype=float)
    val = np.exp(0.25j * (x - x_src) ** 2 / dt) / np.sqrt(4j * np.pi * dt)
    return complex(val) if val.ndim == 0 else val


def free_evolution(x, t, p: WellParams):
    """Initial bound state propagated by K0 alone (well switched off).

    psi0(x, t) = sqrt(gamma/2) [M(x, -i gamma/2, 2t) + M(-x, -i gamma/2, 2t)];
    even in x, and converges pointwise to the bound state as t -> 0+.
    Rejects t <= 0: use :func:`initial_bound_state` at t = 0.
    """
    t = _check_time(t)
    x = np.asarray(x, dtype=float)
    k = -0.5j * p.gamma
    val = np.sqrt(0.5 * p.gamma) * (
        moshinsky(x, k, 2.0 * t) + moshinsky(-x, k, 2.0 * t))
    return complex(val) if np.ndim(val) == 0 else val


def moving_delta_propagator(x, t, x_src, t_src, p: WellParams):
    """Kernel of the moving delta well: free part plus a Moshinsky term.

    K = K0(x,t|x',t') + (gamma/2) e^{i Phi} M(|x - vt| + |x' - vt'|,
    +i gamma/2, 2(t - t')), with
    Phi = [v(x - vt) - v(x' - vt') + v^2 (t - t')/2] / 2.

    Parameters
    ----------
    x : float or array_like
        Arrival position(s).
    t : float
        Arrival time, > ``t_src``.
    x_src, t_src : float
        Source position and time, ``t_src`` >= 0.
    p : WellParams
        Well strength and velocity.

    Returns
    -------
    complex or ndarray
        Kernel values; at gamma -> 0 the perturbation term vanishes and the
        free kernel is recovered.
    """
    t = _check_time(t, positive=False)
    t_src = _check_time(t_src, positive=False, name="t_src")
    dt = t - t_src
    if dt <= 0.0:
        raise ValueError(
            f"moving_delta_propagator requires t > t_src, got dt={dt!r}")
    x = np.asarray(x, dtype=float)
    x_src = float(x_src)
    d_to = x - p.v * t
    d_from = x_src - p.v * t_src
    val = _k0_c(x - x_src, dt) + _pert_c(
        np.abs(d_to), d_to, abs(d_from), d_from, dt, p)
    return complex(val) if val.ndim == 0 else val


def exact_wavefunction_closed(x, t, p: WellParams):
    """Exact wavefunction of the suddenly moving well, closed form.

    psi = psi0 - e^{i(vx/2 - v^2 t/4)} (gamma/2)^{3/2} [ B-/(gamma - iv/2)
    + B+/(gamma + iv/2) ] with a = |x - vt| and
    B-+ = M(a, -+v/2 - i gamma/2, 2t) - M(a, +i gamma/2, 2t).

    At v = 0 this reduces exactly to the stationary bound state times the
    phase e^{i gamma^2 t / 4}.  The independent check against
    :func:`exact_wavefunction_quadrature` is part of the validation suite;
    disagreements there are surfaced, never patched here.
    """
    t = _check_time(t)
    x = np.asarray(x, dtype=float)
    g, v = p.gamma, p.v
    a = np.abs(x - v * t)
    t2 = 2.0 * t
    m_pole = moshinsky(a, 0.5j * g, t2)
    b_minus = moshinsky(a, -0.5 * v - 0.5j * g, t2) - m_pole
    b_plus = moshinsky(a, +0.5 * v - 0.5j * g, t2) - m_pole
    pref = np.exp(1j * (0.5 * v * x - 0.25 * v * v * t)) * (0.5 * g) ** 1.5
    val = free_evolution(x, t, p) - pref * (
        b_minus / (g - 0.5j * v) + b_plus / (g + 0.5j * v))
    return complex(val) if np.ndim(val) == 0 else val


def asymptotic_terms(x, t, p: WellParams) -> AsymptoticTerms:
    """Large-time three-lobe decomposition of the wavefunction.

    Returns the free remnant at the origin, the dragged bound lobe at
    x = vt, and the double-velocity forerunner at x = 2vt, each with its
    full complex phase (no modulus-only shortcut).  The
    decomposition is physically meaningful for v > gamma and
    t >> 1/(v*gamma); it is still evaluated outside that regime, just not
    accurate.

    Parameters
    ----------
    x : float or array_like
        Positions.
    t : float
        Time, > 0.
    p : WellParams
        Well parameters.

    Returns
    -------
    AsymptoticTerms
        Named tuple ``(free, well, double_velocity)`` of complex values.
    """
    t = _check_time(t)
    x = np.asarray(x, dtype=float)
    g, v = p.gamma, p.v

    free = (np.sqrt(2.0 / (1j * np.pi * g * t))
            * np.exp(0.25j * x * x / t) / (1.0 + (x / (g * t)) ** 2))
    well = (np.sqrt(0.5 * g) / (1.0 + (0.5 * v / g) ** 2)
            * np.exp(0.5j * v * x + 0.25j * (g * g - 2.0 * v * v) * t
                     - 0.5 * g * np.abs(x - v * t)))
    dbl = ((1.0 / (1.0 + 0.5j * v / g))
           * np.sqrt(1j * t * g / (8.0 * np.pi))
           / ((x - 2.0 * v * t) + 1j * g * t)
           * np.exp(0.25j * x * x / t - 1j * v * v * t))
    if np.ndim(x) == 0:
        return AsymptoticTerms(complex(free), complex(well), complex(dbl))
    return AsymptoticTerms(free, well, dbl)


# ---------------------------------------------------------------------------
# kernel pieces shared by the closed form and the quadrature engines
# ---------------------------------------------------------------------------

def _k0_c(sep, dt):
    """Free kernel from the separation alone; accepts complex separations."""
    return _cexp(0.25j * sep * sep / dt) / np.sqrt(4j * np.pi * dt)


def _pert_c(a_to, d_to, a_from, d_from, dt, p: WellParams):
    """Moshinsky perturbation term of the moving-well kernel.

    ``d_to``/``d_from`` are the signed displacements from the well position
    at arrival/source time; ``a_to``/``a_from`` their absolute values,
    passed separately so callers on deformed contours can supply the
    analytic continuation of |.| valid on their side of the kink.
    """
    phi = 0.5 * (p.v * d_to - p.v * d_from + 0.25 * p.v**2 * 2.0 * dt)
    m = _moshinsky_c(a_to + a_from, 0.5j * p.gamma, 2.0 * dt)
    return 0.5 * p.gamma * _cexp(1j * phi) * m


def _moshinsky_c(s, k, t):
    """Moshinsky function continued to complex first argument.

    Same two-branch evaluation as :func:`movingwell.specfun.moshinsky`;
    both branches call the Faddeyeva pole sum only in its stable upper
    half-plane, and all exponentials are clamped.
    """
    s_in = np.asarray(s, dtype=complex)
    s = np.atleast_1d(s_in)
    k = complex(k)
    z = 0.5 * (1.0 + 1.0j) * np.sqrt(t) * (k - s / t)
    out = np.empty(s.shape, dtype=complex)
    stable = z.imag <= 0.0
    if np.any(stable):
        zs, ss = z[stable], s[stable]
        out[stable] = 0.5 * _cexp(0.5j * ss * ss / t) * _w_upper(-zs)
    if np.any(~stable):
        zu, su = z[~stable], s[~stable]
        plane = _cexp(1j * (k * su - 0.5 * k * k * t))
        out[~stable] = plane - 0.5 * _cexp(0.5j * su * su / t) * _w_upper(zu)
    return out.reshape(s_in.shape)


# ---------------------------------------------------------------------------
# quadrature ground truth
# ---------------------------------------------------------------------------
#
# psi(x, t) = int K_delta(x, t | z, 0) * psi(z, 0) dz is evaluated on a
# deformed contour.  Both kernel pieces contain Gaussians exp(i q^2 / 4t)
# that decay like exp(-s^2/4t) along rays of direction e^{i pi/4}, so the
# two tails of the real axis rotate onto such rays.  The free-kernel piece
# has a stationary point at z = x; the contour walks the real axis from the
# integrand kink to x before turning off, which avoids the exponential
# ridge between them.  The perturbation piece depends on z only through
# |z - v t_src|, whose reflected geometry keeps its stationary point behind
# the kink -- rays alone suffice there.

def _bound_amp_pair(p: WellParams):
    """Analytic continuations of the initial bound state on each side of 0."""
    c = np.sqrt(0.5 * p.gamma)
    left = lambda z: c * _cexp(+0.5 * p.gamma * z)   # noqa: E731
    right = lambda z: c * _cexp(-0.5 * p.gamma * z)  # noqa: E731
    return left, right


def _eigenstate_amp_pair(p: WellParams):
    """Continuations of the t=0 moving-well eigenstate e^{ivz/2} psi_b(z)."""
    c = np.sqrt(0.5 * p.gamma)
    left = lambda z: c * _cexp((0.5j * p.v + 0.5 * p.gamma) * z)   # noqa: E731
    right = lambda z: c * _cexp((0.5j * p.v - 0.5 * p.gamma) * z)  # noqa: E731
    return left, right


def _propagate_rotated(x, t, p: WellParams, amp_left: Callable,
                       amp_right: Callable, *, t_src=0.0, abs_tol=1e-8):
    """Rotated-contour evaluation of int K_delta(x,t|z,t_src) amp(z) dz.

    ``amp_left``/``amp_right`` are the analytic continuations of the
    initial amplitude valid for Re(z) <= 0 / >= 0 (kink pinned at z = 0,
    which covers evolution from rest where the kernel kink v*t_src
    coincides with it or sits at v*t_src >= 0 handled by the mid segment).
    Scalar ``x`` only; grid sweeps loop (and may do so concurrently --
    everything here is pure).
    """
    x = float(x)
    dt = t - t_src
    kappa = p.v * t_src
    d_to = x - p.v * t
    a_to = abs(d_to)
    tol = abs_tol / 8.0
    # exp(-s^2/4dt) ~ 1e-16.5 at s^2 = 152 dt; the |v| dt term covers the
    # plane-wave shift of that Gaussian peak along the ray.
    ray_len = math.sqrt(152.0 * dt) + abs(p.v) * dt + 2.0 * math.sqrt(dt)

    def n_ray(rate):
        return 32 + int(1.3 * rate * ray_len / (2.0 * np.pi))

    def n_seg(lo, hi, rate_extra=0.0):
        cyc = ((hi - lo) ** 2 / (8.0 * np.pi * dt)
               + (abs(p.v) / 2.0 + rate_extra) * (hi - lo) / (2.0 * np.pi))
        return 16 + int(1.8 * cyc)

    # -- free-kernel piece ------------------------------------------------
    # The left ray leaves from min(0, x) into Re z < 0 territory and the
    # right ray from max(0, x) into Re z > 0, whatever the sign of x; only
    # the real bridge between them changes sides.
    lo, hi = (0.0, x) if x >= 0.0 else (x, 0.0)
    amp_lo, amp_hi = amp_left, amp_right
    amp_mid = amp_right if x >= 0.0 else amp_left

    def t1(z, amp):
        return _k0_c(x - z, dt) * amp(z)

    rate_lo = abs(x - lo) / (2.0 * dt * math.sqrt(2.0)) + abs(p.v) / 2.0
    left_val, _ = ray_quad(lambda z: t1(z, amp_lo), lo, -_ROT,
                           tol=tol, length=ray_len, min_panels=n_ray(rate_lo))
    rate_hi = abs(x - hi) / (2.0 * dt * math.sqrt(2.0)) + abs(p.v) / 2.0
    right_val, _ = ray_quad(lambda z: t1(z, amp_hi), hi, _ROT,
                            tol=tol, length=ray_len, min_panels=n_ray(rate_hi))
    total = right_val - left_val
    if hi > lo:
        mid_val, _ = segment_quad(lambda z: t1(z, amp_mid), lo, hi,
                                  tol=tol, min_panels=n_seg(lo, hi))
        total += mid_val

    # -- perturbation piece -------------------------------------------------
    lo2, hi2 = (0.0, kappa) if kappa >= 0.0 else (kappa, 0.0)
    amp2_mid = amp_right if kappa >= 0.0 else amp_left
    side_mid = -1.0 if kappa >= 0.0 else +1.0

    def t2(z, amp, side):
        d_from = z - kappa
        return _pert_c(a_to, d_to, side * d_from, d_from, dt, p) * amp(z)

    rate2 = math.sqrt(2.0) * a_to / (4.0 * dt) + abs(p.v) / math.sqrt(2.0)
    left2, _ = ray_quad(lambda z: t2(z, amp_left, -1.0), lo2, -_ROT,
                        tol=tol, length=ray_len, min_panels=n_ray(rate2))
    right2, _ = ray_quad(lambda z: t2(z, amp_right, +1.0), hi2, _ROT,
                         tol=tol, length=ray_len, min_panels=n_ray(rate2))
    total += right2 - left2
    if hi2 > lo2:
        mid2, _ = segment_quad(
            lambda z: t2(z, amp2_mid, side_mid), lo2, hi2, tol=tol,
            min_panels=n_seg(lo2, hi2, rate_extra=rate2))
        total += mid2

    return total


def _propagate_axis(x, t, p: WellParams, abs_tol=1e-8):
    """Real-axis Gauss-Kronrod evaluation of the same propagation integral.

    Built from the public kernel and initial state only, with the interval
    split at the x' = 0 kink and truncated where the bound-state envelope
    falls below 1e-15 of its peak.  Orders of magnitude slower than the
    rotated contour; kept as an independent cross-check.
    """
    x = float(x)
    w = 69.0 / p.gamma + abs(x) + abs(p.v) * t + 8.0 * math.sqrt(t) + 5.0
    cycles = (w + abs(x)) ** 2 / (8.0 * np.pi * t)
    limit = int(min(40000, 600 + 4.0 * cycles))

    def f(u):
        return complex(moving_delta_propagator(x, t, u, 0.0, p)
                       * initial_bound_state(u, p))

    left, _ = complex_quad_gk(f, -w, 0.0, epsabs=0.25 * abs_tol, limit=limit)
    right, _ = complex_quad_gk(f, 0.0, w, epsabs=0.25 * abs_tol, limit=limit)
    return left + right


def exact_wavefunction_quadrature(x, t, p: WellParams, *, abs_tol=1e-8,
                                  method="auto"):
    """Ground-truth wavefunction: direct quadrature of the propagation integral.

    Evaluates psi(x, t) = int K_delta(x, t | x', 0) psi(x', 0) dx' without
    ever touching the closed-form wavefunction, so the two routes are
    independent and their agreement is meaningful.

    Parameters
    ----------
    x : float or array_like
        Evaluation position(s); array input is processed pointwise.
    t : float
        Time, > 0.
    p : WellParams
        Well parameters.
    abs_tol : float, optional
        Requested absolute accuracy of each value (default 1e-8).
    method : {"auto", "rotated", "axis"}, optional
        "rotated" (the default behind "auto") integrates on a contour
        deformed into the complex plane where the kernel Gaussians decay;
        "axis" is the plain real-line adaptive Gauss-Kronrod scheme.

    Raises
    ------
    NonConvergenceError
        If the requested tolerance cannot be certified.
    ValueError
        For t <= 0 or an unknown method.
    """
    t = _check_time(t)
    if method not in ("auto", "rotated", "axis"):
        raise ValueError(f"unknown quadrature method {method!r}")
    amp_left, amp_right = _bound_amp_pair(p)

    def one(xi):
        if method == "axis":
            return _propagate_axis(xi, t, p, abs_tol=abs_tol)
        return _propagate_rotated(xi, t, p, amp_left, amp_right,
                                  abs_tol=abs_tol)

    x_arr = np.asarray(x, dtype=float)
    if x_arr.ndim == 0:
        return one(float(x_arr))
    return np.array([one(xi) for xi in x_arr.ravel()]).reshape(x_arr.shape)


def survival_overlap_quadrature(p: WellParams) -> float:
    """|<psi_b^(v)(0) | psi(0)>|^2 by direct numerical overlap.

    The overlap integrand is (gamma/2) e^{-gamma|x|} e^{-ivx/2}; by parity
    only the cosine part survives, integrated on the half line.  Serves as
    the independent check of :func:`survival_probability`.
    """
    from scipy.integrate import quad

    g, v = p.gamma, p.v
    val, _ = quad(lambda u: math.exp(-g * u) * math.cos(0.5 * v * u),
                  0.0, 60.0 / g, epsabs=1e-13, limit=400)
    return (g * val) ** 2


def integral_identity_residual(case: IdentityCase, *, abs_tol=1e-9) -> float:
    """Residual of the half-line Moshinsky integral identity.

    Computes LHS = int_0^inf e^{-i k u} M(|x| + u, -i v0, t) du by damped
    adaptive quadrature and compares with the closed form
    RHS = [M(|x|, k, t) - M(|x|, -i v0, t)] / (v0 - i k), returning
    |LHS - RHS| / (1 + |RHS|).

    Requires Im(k) < 0: that is what damps the plane wave on the half line.
    Quadrature failure raises NonConvergenceError -- deliberately distinct
    from a large returned residual, which means the identity itself failed.
    """
    k, v0, t, ax = case.k, case.v0, case.t, abs(case.x)
    if not k.imag < 0.0:
        raise ValueError(
            "integral_identity_residual requires Im(k) < 0 so the "
            f"half-line integral converges; got k={k!r}")

    decay = -k.imag
    u_span = 34.0 / decay
    cycles = (((ax + u_span) ** 2 - ax * ax) / (8.0 * np.pi * t)
              + abs(k.real) * u_span / (2.0 * np.pi))

    def f(u):
        u = np.asarray(u).real
        return np.exp(-1j * k * u) * moshinsky(ax + u, -1j * v0, t)

    lhs, _ = damped_halfline_quad(f, decay, tol=abs_tol,
                                  min_panels=64 + int(1.2 * cycles))
    rhs = (moshinsky(ax, k, t) - moshinsky(ax, -1j * v0, t)) / (v0 - 1j * k)
    return abs(lhs - rhs) / (1.0 + abs(rhs))
