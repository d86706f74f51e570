"""Entire functions of genus zero with positive zeros.

A product f(lam) = prod_j (1 - lam / E_j) is represented by a finite block of
stored zeros plus an optional power-law tail model E_j = A * (j + shift)**p
for j >= start_index.  Tail sums (phases, log-magnitudes, derivatives) take
explicit terms until E_j >= 2 * |lam| and resum the remainder as a convergent
series of Hurwitz zeta values, so no quadrature error enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta as _hurwitz_zeta

from .errors import FitError, RangeError, ValidationError

_SERIES_MARGIN = 2.0      # switch to the zeta remainder once E_j >= margin * |lam|
_SERIES_TERMS = 64        # geometric decay <= 2**-n makes 64 terms machine-exact
_LOG_OVERFLOW = 700.0     # exp() overflow guard on log-magnitudes


@dataclass(frozen=True)
class ZeroTail:
    """Power-law zero model A * (j + shift)**p for indices j >= start_index."""

    amplitude: float
    exponent: float
    shift: float
    start_index: int

    def __post_init__(self):
        if not (self.amplitude > 0):
            raise ValidationError("tail amplitude must be positive")
        if not (self.exponent > 1):
            raise ValidationError("tail exponent must exceed 1")
        if self.start_index + self.shift <= 0:
            raise ValidationError("start_index + shift must be positive")

    def zero_at(self, j):
        """Modeled zero E_j; j may be an array."""
        j = np.asarray(j, dtype=float)
        return self.amplitude * (j + self.shift) ** self.exponent


@dataclass(frozen=True)
class RotationParams:
    """Rotation angle alpha with omega = e^{i alpha}, phase factor k = e^{i phi}."""

    alpha: float
    phase_offset: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.alpha < math.pi / 2):
            raise ValidationError("alpha must lie strictly inside (0, pi/2)")

    @property
    def omega(self) -> complex:
        return complex(math.cos(self.alpha), math.sin(self.alpha))

    @property
    def phase_factor(self) -> complex:
        return complex(math.cos(self.phase_offset), math.sin(self.phase_offset))

    @property
    def theta(self) -> float:
        return math.pi - 2.0 * self.alpha


@dataclass(frozen=True)
class EntireProduct:
    """Genus-zero product with stored zeros and optional tail model.

    Treat instances as immutable; every operation is pure.
    """

    zeros: np.ndarray
    tail: Optional[ZeroTail] = None

    def eval(self, lam):
        return eval_product(self, lam)

    def phase_on_ray(self, rot: RotationParams, t):
        return phase_on_ray(self, rot, t)

    def __len__(self):
        return len(self.zeros)


def make_product(zeros: Sequence[float], tail: Optional[ZeroTail] = None) -> EntireProduct:
    """Validate and build an EntireProduct.

    Zeros must be strictly positive and strictly increasing; a tail, when
    given, must start above the last stored zero.
    """
    arr = np.asarray(zeros, dtype=float)
    if arr.ndim != 1:
        raise ValidationError("zeros must be a one-dimensional sequence")
    for i, value in enumerate(arr):
        if not value > 0:
            raise ValidationError(f"zero at index {i + 1} is not positive: {value}")
        if i > 0 and value <= arr[i - 1]:
            raise ValidationError(f"zeros not strictly increasing at index {i + 1}")
    if tail is not None:
        if tail.start_index != len(arr) + 1:
            raise ValidationError(
                f"tail start_index {tail.start_index} does not continue the "
                f"stored list of length {len(arr)}"
            )
        first_modeled = float(tail.zero_at(tail.start_index))
        if len(arr) and first_modeled <= arr[-1]:
            raise ValidationError(
                f"first modeled zero {first_modeled:.6g} does not exceed the "
                f"last stored zero {arr[-1]:.6g}"
            )
    return EntireProduct(zeros=arr.copy(), tail=tail)


# ----------------------------------------------------------------------
# tail machinery
# ----------------------------------------------------------------------

def _tail_split(tail: ZeroTail, q: float):
    """Split the tail at |lam| = q into explicit zeros and a remainder base.

    Returns (explicit_zeros, y0) where the remainder runs over j with
    j + shift >= y0 and every remainder zero satisfies E_j >= margin * q.
    """
    j0 = tail.start_index
    if q > 0:
        need = (_SERIES_MARGIN * q / tail.amplitude) ** (1.0 / tail.exponent) - tail.shift
        j0 = max(j0, int(math.ceil(need - 1e-12)))
    explicit = tail.zero_at(np.arange(tail.start_index, j0)) if j0 > tail.start_index else np.empty(0)
    return explicit, j0 + tail.shift


def _zeta_row(tail: ZeroTail, y0: float):
    ns = np.arange(1, _SERIES_TERMS + 1, dtype=float)
    zs = _hurwitz_zeta(tail.exponent * ns, y0)
    return ns, np.log(zs)


def _tail_phase_series(tail, alpha, t, y0):
    """Remainder of sum_j arg(1 - omega^{-2} t / E_j) over modeled zeros beyond y0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    mask = t > 0
    if not mask.any():
        return out
    ns, log_zeta = _zeta_row(tail, y0)
    log_t = np.log(t[mask])
    # term_n = t^n sin(2 n alpha) / (n A^n) * zeta(p n, y0); |ratio| <= 1/2
    expo = np.outer(np.atleast_1d(log_t) - math.log(tail.amplitude), ns)
    terms = np.exp(expo + log_zeta - np.log(ns)) * np.sin(2.0 * alpha * ns)
    out[mask] = terms.sum(axis=-1)
    return out


def _tail_phase_deriv_series(tail, alpha, t, y0):
    t = np.asarray(t, dtype=float)
    ns, log_zeta = _zeta_row(tail, y0)
    out = np.empty_like(t)
    zero_mask = t == 0
    if zero_mask.any():
        out[zero_mask] = math.sin(2 * alpha) * math.exp(log_zeta[0]) / tail.amplitude
    if (~zero_mask).any():
        log_t = np.log(t[~zero_mask])
        expo = np.outer(np.atleast_1d(log_t) - math.log(tail.amplitude), ns)
        terms = np.exp(expo + log_zeta) * np.sin(2.0 * alpha * ns)
        out[~zero_mask] = terms.sum(axis=-1) / t[~zero_mask]
    return out


def _tail_log_series(tail, lam, y0):
    """Remainder of sum_j log(1 - lam / E_j), complex lam, |lam| <= E_j / 2."""
    lam = np.asarray(lam, dtype=complex)
    out = np.zeros_like(lam)
    mask = np.abs(lam) > 0
    if not mask.any():
        return out
    ns, log_zeta = _zeta_row(tail, y0)
    lm = lam[mask]
    log_abs = np.log(np.abs(lm))
    unit = lm / np.abs(lm)
    mag = np.exp(np.outer(log_abs - math.log(tail.amplitude), ns) + log_zeta - np.log(ns))
    phases = unit[..., None] ** ns
    out[mask] = -(mag * phases).sum(axis=-1)
    return out


def _tail_logderiv_series(tail, lam, y0):
    """Remainder of sum_j 1 / (lam - E_j) over modeled zeros beyond y0."""
    lam = np.asarray(lam, dtype=complex)
    ns, log_zeta = _zeta_row(tail, y0)
    out = np.empty_like(lam)
    zero_mask = lam == 0
    if zero_mask.any():
        out[zero_mask] = -np.exp(log_zeta[0]) / tail.amplitude
    if (~zero_mask).any():
        lm = lam[~zero_mask]
        log_abs = np.log(np.abs(lm))
        unit = lm / np.abs(lm)
        mag = np.exp(np.outer(log_abs - math.log(tail.amplitude), ns) + log_zeta)
        phases = unit[..., None] ** ns
        out[~zero_mask] = -(mag * phases).sum(axis=-1) / lm
    return out


# ----------------------------------------------------------------------
# evaluation
# ----------------------------------------------------------------------

def eval_product(P: EntireProduct, lam):
    """Value of the product at complex lam (scalar or array).

    Stored factors are summed in log space; the result is exactly 0 only when
    lam coincides with a stored zero.  Raises RangeError when the magnitude
    leaves binary64 range.
    """
    lam_arr = np.asarray(lam, dtype=complex)
    scalar = lam_arr.ndim == 0
    lam_flat = np.atleast_1d(lam_arr)
    out = np.empty(lam_flat.shape, dtype=complex)

    factors = 1.0 - lam_flat[..., None] / P.zeros if len(P.zeros) else None
    exact = np.zeros(lam_flat.shape, dtype=bool)
    if factors is not None:
        exact = np.any(factors == 0, axis=-1)

    log_sum = np.zeros(lam_flat.shape, dtype=complex)
    if factors is not None:
        safe = np.where(factors == 0, 1.0, factors)
        log_sum = np.log(safe).sum(axis=-1)
    if P.tail is not None:
        q = float(np.max(np.abs(lam_flat))) if lam_flat.size else 0.0
        explicit, y0 = _tail_split(P.tail, q)
        if len(explicit):
            log_sum = log_sum + np.log(1.0 - lam_flat[..., None] / explicit).sum(axis=-1)
        log_sum = log_sum + _tail_log_series(P.tail, lam_flat, y0)

    mag = np.real(log_sum)
    if np.any(mag > _LOG_OVERFLOW):
        worst = float(np.max(mag))
        raise RangeError(f"product magnitude exp({worst:.1f}) exceeds binary64 range")
    out = np.where(exact, 0.0, np.exp(log_sum))
    return complex(out[0]) if scalar else out.reshape(lam_arr.shape)


def log_derivative(P: EntireProduct, lam):
    """f'(lam)/f(lam) = sum_j 1/(lam - E_j), including the tail.

    At a stored zero the sum has a pole; the non-finite result is the
    honest answer there and callers that probe zeros handle it."""
    lam_arr = np.asarray(lam, dtype=complex)
    scalar = lam_arr.ndim == 0
    lam_flat = np.atleast_1d(lam_arr)
    total = np.zeros(lam_flat.shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        if len(P.zeros):
            total = (1.0 / (lam_flat[..., None] - P.zeros)).sum(axis=-1)
        if P.tail is not None:
            q = float(np.max(np.abs(lam_flat))) if lam_flat.size else 0.0
            explicit, y0 = _tail_split(P.tail, q)
            if len(explicit):
                total = total + (1.0 / (lam_flat[..., None] - explicit)).sum(axis=-1)
            total = total + _tail_logderiv_series(P.tail, lam_flat, y0)
    return complex(total[0]) if scalar else total.reshape(lam_arr.shape)


def eval_derivative(P: EntireProduct, lam):
    """f'(lam); valid also exactly at a stored zero (leave-one-out form)."""
    lam_c = complex(lam)
    hits = np.nonzero(1.0 - lam_c / P.zeros == 0)[0] if len(P.zeros) else np.empty(0, int)
    if len(hits) == 0:
        return eval_product(P, lam_c) * log_derivative(P, lam_c)
    i = int(hits[0])
    others = np.delete(P.zeros, i)
    log_sum = np.log(1.0 - lam_c / others).sum() if len(others) else 0.0
    if P.tail is not None:
        explicit, y0 = _tail_split(P.tail, abs(lam_c))
        if len(explicit):
            log_sum = log_sum + np.log(1.0 - lam_c / explicit).sum()
        log_sum = log_sum + complex(_tail_log_series(P.tail, np.array([lam_c]), y0)[0])
    return (-1.0 / P.zeros[i]) * np.exp(log_sum)


def phase_on_ray(P: EntireProduct, rot: RotationParams, t):
    """Continuous argument of f(omega^{-2} t) for t >= 0, zero at t = 0.

    Each stored factor contributes atan2((t/E) sin 2a, 1 - (t/E) cos 2a),
    which lies in (0, pi) for t > 0, realising the increasing branch.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValidationError("phase_on_ray requires t >= 0")
    scalar = t_arr.ndim == 0
    t_flat = np.atleast_1d(t_arr)
    s2, c2 = math.sin(2 * rot.alpha), math.cos(2 * rot.alpha)
    total = np.zeros(t_flat.shape)
    if len(P.zeros):
        ratio = t_flat[..., None] / P.zeros
        total = np.arctan2(ratio * s2, 1.0 - ratio * c2).sum(axis=-1)
    if P.tail is not None:
        q = float(np.max(t_flat)) if t_flat.size else 0.0
        explicit, y0 = _tail_split(P.tail, q)
        if len(explicit):
            ratio = t_flat[..., None] / explicit
            total = total + np.arctan2(ratio * s2, 1.0 - ratio * c2).sum(axis=-1)
        total = total + _tail_phase_series(P.tail, rot.alpha, t_flat, y0)
    return float(total[0]) if scalar else total.reshape(t_arr.shape)


def phase_derivative(P: EntireProduct, rot: RotationParams, t):
    """d/dt of phase_on_ray; strictly positive for t > 0."""
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_flat = np.atleast_1d(t_arr)
    s2, c2 = math.sin(2 * rot.alpha), math.cos(2 * rot.alpha)
    total = np.zeros(t_flat.shape)
    if len(P.zeros):
        E = P.zeros
        denom = (E - t_flat[..., None] * c2) ** 2 + (t_flat[..., None] * s2) ** 2
        total = (E * s2 / denom).sum(axis=-1)
    if P.tail is not None:
        q = float(np.max(t_flat)) if t_flat.size else 0.0
        explicit, y0 = _tail_split(P.tail, q)
        if len(explicit):
            denom = (explicit - t_flat[..., None] * c2) ** 2 + (t_flat[..., None] * s2) ** 2
            total = total + (explicit * s2 / denom).sum(axis=-1)
        total = total + _tail_phase_deriv_series(P.tail, rot.alpha, t_flat, y0)
    return float(total[0]) if scalar else total.reshape(t_arr.shape)


def modulus_profile(P: EntireProduct, r: float, theta):
    """|f(r e^{i theta})|; even and 2 pi periodic in theta."""
    if not r > 0:
        raise ValidationError("modulus_profile requires r > 0")
    theta_arr = np.asarray(theta, dtype=float)
    lam = r * np.exp(1j * theta_arr)
    value = eval_product(P, lam)
    return np.abs(value)


# ----------------------------------------------------------------------
# tail fitting
# ----------------------------------------------------------------------

def _fit_for_shift(log_e, js, shift, exponent):
    """Least squares of log E on log(j + shift); returns (log_a, p, rss)."""
    x = np.log(js + shift)
    if exponent is None:
        n = len(x)
        sx, sy = x.sum(), log_e.sum()
        sxx, sxy = (x * x).sum(), (x * log_e).sum()
        det = n * sxx - sx * sx
        p = (n * sxy - sx * sy) / det
        log_a = (sy - p * sx) / n
    else:
        p = exponent
        log_a = float(np.mean(log_e - p * x))
    resid = log_e - (log_a + p * x)
    return log_a, p, float(resid @ resid)


def fit_tail(zeros: Sequence[float], window: int,
             exponent: Optional[float] = None,
             amplitude: Optional[float] = None,
             validate: bool = True) -> ZeroTail:
    """Fit a power-law tail to the trailing `window` zeros.

    The exponent is fitted unless supplied explicitly (used when the growth
    law is known in advance).  The shift enters nonlinearly and is resolved
    by a bounded one-dimensional minimisation of the residual.

    When the amplitude is supplied as well (both growth constants known,
    only the index offset unknown) the shift is the unique linear solution;
    this variant is what pins the overall scale during quantization runs.

    validate=False skips the last-zero consistency check; iteration loops
    use this because a transient sequence far from its fixed point is
    allowed to disagree with the anchored tail model.
    """
    arr = np.asarray(zeros, dtype=float)
    n = len(arr)
    if window < 3:
        raise ValidationError("window must be at least 3")
    if window > n:
        raise ValidationError("window exceeds the number of stored zeros")
    if amplitude is not None and exponent is None:
        raise ValidationError("fixing the amplitude requires a fixed exponent")
    if amplitude is not None and amplitude <= 0:
        raise ValidationError("amplitude must be positive")
    block = arr[n - window:]
    if np.any(np.diff(block) <= 0):
        raise FitError("trailing zeros are not increasing; fit is degenerate")
    js = np.arange(n - window + 1, n + 1, dtype=float)
    log_e = np.log(block)

    if amplitude is not None:
        shift = float(np.mean((block / amplitude) ** (1.0 / exponent) - js))
        if shift <= -js[0]:
            raise FitError("fixed-amplitude fit drove the shift past the "
                           "first window index")
        tail = ZeroTail(amplitude=float(amplitude), exponent=float(exponent),
                        shift=shift, start_index=n + 1)
        last_model = float(tail.zero_at(n))
        if validate and abs(last_model - arr[-1]) > 0.01 * arr[-1]:
            raise FitError(
                f"fitted tail reproduces the last zero as {last_model:.6g}, "
                f"more than 1% away from {arr[-1]:.6g}"
            )
        return tail

    lo = -js[0] + 1e-9
    hi = 4.0 * js[-1]

    def objective(shift):
        return _fit_for_shift(log_e, js, shift, exponent)[2]

    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    shift = float(res.x)
    log_a, p, rss = _fit_for_shift(log_e, js, shift, exponent)
    if not np.isfinite(rss):
        raise FitError("tail fit did not produce finite residuals")
    tail = ZeroTail(amplitude=float(np.exp(log_a)), exponent=float(p),
                    shift=shift, start_index=n + 1)
    last_model = float(tail.zero_at(n))
    if validate and abs(last_model - arr[-1]) > 0.01 * arr[-1]:
        raise FitError(
            f"fitted tail reproduces the last zero as {last_model:.6g}, "
            f"more than 1% away from {arr[-1]:.6g}"
        )
    return tail
