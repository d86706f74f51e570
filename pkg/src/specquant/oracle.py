"""Independent shooting oracle for the monomial oscillator family.

Everything is reduced to one base solution of y'' = (z^m + mu) y on the
positive real axis, normalized to decay as z -> +inf.  The solution on
ray k is y_k(z) = w^{k/2} y0(w^{-k} z, w^{2k} lam) with w = e^{2 pi i/(m+2)},
so all origin data come from inward integrations at rotated spectral
parameters.  The seed at z = R uses the first five terms of the
logarithmic-derivative expansion of the decaying solution plus an exact
treatment of the normalization integral, which keeps the seed error near
1e-11 at moderate R.  Values are carried as (scaled pair, log magnitude)
to survive the e^{+-several hundred} dynamic range.

Spectra are found by marching a sign functional (a Wronskian bracket that
is exactly purely imaginary on the real spectral line) and refining
brackets in lockstep, so one vectorized integration serves a whole batch
of spectral points.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (ConditioningError, DomainError, IntegrationError,
                     RangeError, ValidationError)
from .products import RotationParams, fit_tail, make_product
from .specfun import EigenvalueSet, SpectralFunction, complex_zeros

_RTOL = 3e-14
_SEGMENT_BUDGET = 250.0        # max growth of log|y| per rescaling segment
_SEED_TARGET = 3e-9            # bound on the largest included seed term
_PANEL_LIMIT = 44
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)

_ORIGIN_CACHE: Dict[tuple, tuple] = {}


# ----------------------------------------------------------------------
# problem description
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ODEProblem:
    """Oscillator -u'' + (-1)^ell (i x)^m u = lam u, posed through the
    rotated equation y'' = (z^m + mu) y.

    The internal spectral variable is s = -lam, so the determinant zeros
    come out positive internally; convention_map flips between the two.
    """

    m: float
    ell: int = 1

    def __post_init__(self):
        if not self.m >= 2.0:
            raise DomainError("m must be at least 2")
        if self.ell not in (1, 2):
            raise ValidationError("ell must be 1 or 2")

    @property
    def alpha(self) -> float:
        return 2.0 * math.pi / (self.m + 2.0)

    @property
    def omega(self) -> complex:
        return cmath.exp(1j * self.alpha)

    @property
    def boundary_rays(self) -> Tuple[float, float]:
        half = (self.ell + 1) * math.pi / (self.m + 2.0)
        return (math.pi / 2.0 - half, math.pi / 2.0 + half)

    @property
    def sign_map(self) -> float:
        # multiplier taking the oscillator's lam to the internal variable
        return -1.0


@dataclass(frozen=True)
class SolutionRecord:
    ray: float
    value: complex
    derivative: complex
    seed_radius: float
    error_estimate: float
    rotated_parameter: complex = 0j


def convention_map(prob: ODEProblem, value: complex, direction: str = "to_internal") -> complex:
    """Flip between the oscillator's lam and the internal variable s = -lam."""
    if direction not in ("to_internal", "to_oscillator"):
        raise ValidationError(f"unknown direction: {direction!r}")
    return prob.sign_map * value


def _omega_power(m: float, x: float) -> complex:
    return cmath.exp(2j * math.pi * x / (m + 2.0))


# ----------------------------------------------------------------------
# seed: decaying-solution data at z = R
# ----------------------------------------------------------------------

def _phi(m: float, z: float) -> float:
    if z <= 0.0:
        return 0.0
    return 2.0 / (m + 2.0) * z ** ((m + 2.0) / 2.0)


def _c4(m: float) -> float:
    # coefficient of the t^{-(3m/2+4)} term of the fifth expansion term
    return (-m * (m - 1) * (m - 2) * (m - 3) / 32.0
            + 7.0 * m * m * (m - 1) * (m - 2) / 32.0
            + 19.0 * m * m * (m - 1) ** 2 / 128.0
            - 221.0 * m ** 3 * (m - 1) / 256.0
            + 1105.0 * m ** 4 / 2048.0)


def _w234(m, mu, t):
    """Terms 3..5 of the logarithmic-derivative expansion, exact in mu.

    Written in the ratios Q^{(k)}/Q, which stay bounded however large the
    panel abscissae grow, so nothing here overflows before the panel loop
    bails out.
    """
    Q = t ** m + mu
    sq = np.sqrt(Q)
    r1 = m * t ** (m - 1) / Q
    r2 = m * (m - 1) * t ** (m - 2) / Q
    r3 = m * (m - 1) * (m - 2) * t ** (m - 3) / Q
    r4 = m * (m - 1) * (m - 2) * (m - 3) * t ** (m - 4) / Q
    w2 = (-r2 / 8.0 + 5.0 * r1 ** 2 / 32.0) / sq
    w3 = (-r3 / 16.0 + 9.0 * r1 * r2 / 32.0 - 15.0 * r1 ** 3 / 64.0) / Q
    w4 = (-r4 / 32.0 + 7.0 * r1 * r3 / 32.0 + 19.0 * r2 ** 2 / 128.0
          - 221.0 * r1 ** 2 * r2 / 256.0
          + 1105.0 * r1 ** 4 / 2048.0) / (Q * sq)
    return w2 + w3 + w4


def _logderiv(m, mu, t):
    """y'/y of the decaying solution, five expansion terms."""
    Q = t ** m + mu
    return -np.sqrt(Q) - m * t ** (m - 1) / (4.0 * Q) + _w234(m, mu, t)


def _decay_integrand(m, mu, t):
    """Integrand of the normalization integral: y'/y plus the closed-form
    antiderivative pieces removed (and the log-divergent piece for m = 2)."""
    tm = t ** m
    x = mu / tm
    g0 = -t ** (m / 2.0) * x / (np.sqrt(1.0 + x) + 1.0)
    g1 = (m / (4.0 * t)) * mu / (tm + mu)
    g = g0 + g1 + _w234(m, mu, t)
    if m == 2.0:
        g = g + mu / (2.0 * t)
    return g


def _seed_integral(m: float, mus: np.ndarray, R: float) -> np.ndarray:
    """Integral of the decay integrand from R to infinity, one value per mu.

    Geometric panels with 24-point Gauss-Legendre, stopped once a panel is
    negligible, plus the analytic large-t remainder at the stopping point.
    """
    mus_col = mus[:, None]
    total = np.zeros(len(mus), dtype=complex)
    a = R
    for _ in range(_PANEL_LIMIT):
        b = 2.0 * a
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        ts = mid + half * _GL_NODES
        vals = _decay_integrand(m, mus_col, ts)
        panel = half * (vals * _GL_WEIGHTS).sum(axis=-1)
        total += panel
        a = b
        if np.max(np.abs(panel)) < 1e-18 * max(float(np.max(np.abs(total))), 1e-30):
            break
    T = a
    if m > 2.0:
        total += -(mus / 2.0) * T ** (1.0 - m / 2.0) / (m / 2.0 - 1.0)
    total += (mus * mus / 8.0) * T ** (1.0 - 1.5 * m) / (1.5 * m - 1.0)
    total += m * (m + 4.0) / 32.0 * T ** (-(m / 2.0 + 1.0)) / (m / 2.0 + 1.0)
    total += (mus / 4.0) * T ** (-m)
    return total


def _radius(m: float, mus: np.ndarray, rmin: Optional[float] = None) -> float:
    qmax = float(np.max(np.abs(mus))) if len(mus) else 0.0
    r_phi = ((m + 2.0) / 2.0 * 30.0) ** (2.0 / (m + 2.0))
    p = 1.5 * m + 3.0
    r_acc = (max(abs(_c4(m)), 1.0) / (p * _SEED_TARGET)) ** (1.0 / p)
    r_mu = (25.0 * qmax) ** (1.0 / m) if qmax > 0 else 0.0
    return max(r_phi, r_acc, r_mu, rmin or 0.0)


def _seed_error_estimate(m: float, R: float) -> float:
    p = 1.5 * m + 3.0
    i4 = abs(_c4(m)) * R ** (-p) / p
    return max(1e-11, 5.0 * (i4 + _phi(m, R) * _RTOL))


def _seed_data(m: float, mus: np.ndarray, R: float):
    """Scaled origin of the integration: value, derivative, log magnitude."""
    L = -_phi(m, R) - (m / 4.0) * math.log(R) - _seed_integral(m, mus, R)
    if m == 2.0:
        # the normalization integral sheds a mu/(2t) piece whose
        # antiderivative joins the power prefactor
        L = L - (mus / 2.0) * math.log(R)
    lg = L.real.astype(float)
    v = np.exp(1j * L.imag)
    d = _logderiv(m, mus, np.float64(R)) * v
    return v.astype(complex), d.astype(complex), lg


# ----------------------------------------------------------------------
# propagation with rescaling
# ----------------------------------------------------------------------

def _knot_path(m: float, z_from: float, z_to: float,
               checkpoints: Sequence[float] = ()) -> List[float]:
    phi_a, phi_b = _phi(m, z_from), _phi(m, z_to)
    lo, hi = min(phi_a, phi_b), max(phi_a, phi_b)
    n = int(math.ceil((hi - lo) / _SEGMENT_BUDGET))
    interior = []
    for j in range(1, n):
        phi_j = hi - j * _SEGMENT_BUDGET
        interior.append(((m + 2.0) / 2.0 * max(phi_j, 0.0)) ** (2.0 / (m + 2.0)))
    pts = set()
    span = abs(z_from - z_to)
    for z in interior + [c for c in checkpoints
                         if min(z_from, z_to) < c < max(z_from, z_to)]:
        if min(z_from, z_to) < z < max(z_from, z_to):
            pts.add(float(z))
    wanted = {float(c) for c in checkpoints}
    ordered = sorted(pts, reverse=(z_to < z_from))
    # merge near-duplicates so solve_ivp never gets a zero-length span,
    # always keeping the checkpoint representative of a cluster
    merged: List[float] = []
    for z in ordered:
        if not merged or abs(z - merged[-1]) > 1e-12 * max(span, 1.0):
            merged.append(z)
        elif z in wanted and merged[-1] not in wanted:
            merged[-1] = z
    merged.append(float(z_to))
    return merged


def _propagate(m: float, mus: np.ndarray, y: np.ndarray, lg: np.ndarray,
               z_from: float, z_to: float, checkpoints: Sequence[float] = ()):
    """Advance the scaled pair (y, y') from z_from to z_to, rescaling at
    growth knots; returns final state plus states at the checkpoints."""
    K = len(mus)
    cp_wanted = {float(c) for c in checkpoints}

    def rhs(z, flat):
        arr = flat.reshape(2, K)
        out = np.empty_like(arr)
        out[0] = arr[1]
        out[1] = (z ** m + mus) * arr[0]
        return out.ravel()

    saved = {}
    cur = float(z_from)
    y = y.copy()
    lg = lg.copy()
    for nxt in _knot_path(m, z_from, z_to, checkpoints):
        atol = 1e-16 * float(np.max(np.abs(y)))
        sol = solve_ivp(rhs, (cur, nxt), y.ravel(), method="DOP853",
                        rtol=_RTOL, atol=max(atol, 1e-300))
        if not sol.success:
            raise IntegrationError(
                f"integration stalled near z = {sol.t[-1]:.6g}: {sol.message}")
        y = sol.y[:, -1].reshape(2, K).copy()
        scale = np.maximum(np.max(np.abs(y), axis=0), 1e-300)
        y /= scale
        lg = lg + np.log(scale)
        if float(nxt) in cp_wanted:
            saved[float(nxt)] = (y.copy(), lg.copy())
        cur = nxt
    return y, lg, saved


def _origin_batch(m: float, mus: Sequence[complex],
                  rmin: Optional[float] = None) -> List[tuple]:
    """Origin data (v, d, lg, R, est) for each mu, via one shared batch
    integration per cache-miss group."""
    mus_arr = np.asarray(list(mus), dtype=complex)
    if mus_arr.size == 0:
        return []
    R = _radius(m, mus_arr, rmin)
    keys = [(m, complex(mu), R) for mu in mus_arr]
    missing_idx = [i for i, k in enumerate(keys) if k not in _ORIGIN_CACHE]
    if missing_idx:
        sub = mus_arr[missing_idx]
        v0, d0, lg0 = _seed_data(m, sub, R)
        y = np.vstack([v0, d0])
        y_end, lg_end, _ = _propagate(m, sub, y, lg0, R, 0.0)
        est = _seed_error_estimate(m, R)
        for j, i in enumerate(missing_idx):
            _ORIGIN_CACHE[keys[i]] = (complex(y_end[0, j]), complex(y_end[1, j]),
                                      float(lg_end[j]), R, est)
    return [_ORIGIN_CACHE[k] for k in keys]


def _origin_one(m: float, mu: complex, rmin: Optional[float] = None) -> tuple:
    return _origin_batch(m, [mu], rmin)[0]


# ----------------------------------------------------------------------
# solution records and determinant
# ----------------------------------------------------------------------

def sibuya_solution(prob: ODEProblem, lam: complex, ray: float = 0.0,
                    rmin: Optional[float] = None) -> SolutionRecord:
    """Origin data of the ray-k solution y_k at spectral parameter lam."""
    m = prob.m
    k = float(ray)
    if abs(2.0 * k - round(2.0 * k)) > 1e-12:
        raise ValidationError("ray index must be an integer or half-odd-integer")
    if abs(k) * 2.0 * math.pi / (m + 2.0) >= math.pi:
        raise DomainError("ray direction touches the branch cut")
    mu = _omega_power(m, 2.0 * k) * complex(lam)
    v, d, lg, R, est = _origin_one(m, mu, rmin)
    if abs(lg) > 690.0:
        raise RangeError("origin data magnitude leaves binary64 range")
    scale = math.exp(lg)
    return SolutionRecord(
        ray=k,
        value=_omega_power(m, k / 2.0) * v * scale,
        derivative=_omega_power(m, -k / 2.0) * d * scale,
        seed_radius=R,
        error_estimate=est,
        rotated_parameter=mu)


def determinant_f(prob: ODEProblem, lam: complex) -> complex:
    """Spectral determinant y_0(0, lam) normalized so the value at 0 is 1."""
    m = prob.m
    (v, _, lg, _, _), (v0, _, lg0, _, _) = (
        _origin_one(m, complex(lam)), _origin_one(m, 0j))
    return (v / v0) * cmath.exp(lg - lg0)


def determinant_many(prob: ODEProblem, lams: Sequence[complex]) -> np.ndarray:
    m = prob.m
    recs = _origin_batch(m, [complex(x) for x in lams])
    v0, _, lg0, _, _ = _origin_one(m, 0j)
    return np.array([(v / v0) * cmath.exp(lg - lg0)
                     for v, _, lg, _, _ in recs])


# ----------------------------------------------------------------------
# Stokes multipliers
# ----------------------------------------------------------------------

def _c0_from_records(m, rec_p, rec_0, rec_m):
    w1 = _omega_power(m, 1.0)
    wh = _omega_power(m, 0.5)
    vp, dp, lgp = rec_p[0], rec_p[1], rec_p[2]
    v0, d0, lg0 = rec_0[0], rec_0[1], rec_0[2]
    vm, dm, lgm = rec_m[0], rec_m[1], rec_m[2]
    num = w1 * vp * dm - vm * dp / w1
    den = wh * v0 * dm - vm * d0 / wh
    if abs(den) < 1e-10 * (abs(wh * v0 * dm) + abs(vm * d0 / wh)):
        raise ConditioningError("reference Wronskian lost all significant digits")
    return (num / den) * cmath.exp(lgp - lg0)


def stokes_C0(prob: ODEProblem, lam: complex) -> complex:
    """Connection coefficient in y_1 = C0 y_0 - y_{-1}, from Wronskians of
    origin data."""
    m = prob.m
    lam = complex(lam)
    w2 = _omega_power(m, 2.0)
    recs = _origin_batch(m, [w2 * lam, lam, lam / w2])
    return _c0_from_records(m, recs[0], recs[1], recs[2])


def _d0_from_records(m, rec_m3, rec_p3, rec_p1):
    w32 = _omega_power(m, 1.5)
    wh = _omega_power(m, 0.5)
    vm, dm, lgm = rec_m3[0], rec_m3[1], rec_m3[2]
    vp, dp, lgp = rec_p3[0], rec_p3[1], rec_p3[2]
    vh, dh, lgh = rec_p1[0], rec_p1[1], rec_p1[2]
    num = vm * dp / w32 - w32 * dm * vp
    den = vh * dp / wh - wh * dh * vp
    if abs(den) < 1e-10 * (abs(vh * dp / wh) + abs(wh * dh * vp)):
        raise ConditioningError("reference Wronskian lost all significant digits")
    return (num / den) * cmath.exp(lgm - lgh)


def stokes_D0(prob: ODEProblem, lam: complex, route: str = "composition") -> complex:
    """Second-level multiplier; zero exactly when the two outermost-ray
    solutions are dependent.

    route "composition": C0(w^{-1} lam) C0(w lam) - 1;
    route "wronskian":   Wronskian of the +-3/2-ray pair over the 1/2-ray
                         reference pair.
    """
    m = prob.m
    lam = complex(lam)
    w1 = _omega_power(m, 1.0)
    if route == "composition":
        return stokes_C0(prob, lam / w1) * stokes_C0(prob, w1 * lam) - 1.0
    if route == "wronskian":
        w3 = _omega_power(m, 3.0)
        recs = _origin_batch(m, [lam / w3, w3 * lam, w1 * lam])
        return _d0_from_records(m, recs[0], recs[1], recs[2])
    raise ValidationError(f"unknown route: {route!r}")


def wronskian_value(prob: ODEProblem, lam: complex, ray: float = 0.0) -> complex:
    """W(y_k, y_{k+1}); equals 2i identically in exact arithmetic (for the
    normalizable cases m > 2)."""
    m = prob.m
    k = float(ray)
    mu_a = _omega_power(m, 2.0 * k) * complex(lam)
    mu_b = _omega_power(m, 2.0 * k + 2.0) * complex(lam)
    (va, da, lga, _, _), (vb, db, lgb, _, _) = (
        _origin_one(m, mu_a), _origin_one(m, mu_b))
    wh = _omega_power(m, 0.5)
    bracket = va * db / wh - wh * da * vb
    return bracket * cmath.exp(lga + lgb)


def wronskian_drift(prob: ODEProblem, lam: complex, fraction: float = 0.5) -> float:
    """Relative disagreement of W(y_0, y_{-1}) computed at the origin and at
    z = fraction * R; a pure integrator health number."""
    m = prob.m
    lam = complex(lam)
    w2 = _omega_power(m, 2.0)
    wh = _omega_power(m, 0.5)
    mus = np.array([lam, lam / w2], dtype=complex)
    R = _radius(m, mus)
    c = fraction * R

    # inward pass for y_0 with a checkpoint
    v, d, lg = _seed_data(m, mus[:1], R)
    y0_end, lg0_end, saved = _propagate(m, mus[:1], np.vstack([v, d]), lg,
                                        R, 0.0, checkpoints=(c,))
    y0_c, lg0_c = saved[c]

    # y_{-1} from its own origin data, pushed outward along the same axis;
    # as a function of z it satisfies the equation at the unrotated lam
    vm, dm, lgm, _, _ = _origin_one(m, complex(mus[1]))
    start = np.array([[vm / wh], [wh * dm]], dtype=complex)
    ym_c, lgm_c, _ = _propagate(m, mus[:1], start, np.array([lgm]), 0.0, c)

    def bracket(ya, yb):
        return ya[0, 0] * yb[1, 0] - ya[1, 0] * yb[0, 0]

    w_origin = bracket(y0_end, np.array([[vm / wh], [wh * dm]]))
    lg_origin = lg0_end[0] + lgm
    w_match = bracket(y0_c, ym_c)
    lg_match = lg0_c[0] + lgm_c[0]
    if w_origin == 0:
        raise ConditioningError("origin Wronskian vanished")
    ratio = (w_match / w_origin) * cmath.exp(lg_match - lg_origin)
    return abs(ratio - 1.0)


def dependency_residual(prob: ODEProblem, lam: complex) -> float:
    """Relative size of y_1 + y_{-1} - C0 y_0 at the origin."""
    m = prob.m
    lam = complex(lam)
    w2 = _omega_power(m, 2.0)
    wh = _omega_power(m, 0.5)
    recs = _origin_batch(m, [w2 * lam, lam, lam / w2])
    c0 = _c0_from_records(m, recs[0], recs[1], recs[2])
    (vp, dp, lgp, _, _), (v0, d0, lg0, _, _), (vm, dm, lgm, _, _) = recs
    a = wh * vp * cmath.exp(lgp)
    b = vm / wh * cmath.exp(lgm)
    c = c0 * v0 * cmath.exp(lg0)
    r_val = abs(a + b - c) / max(abs(a), abs(b), abs(c))
    a = dp / wh * cmath.exp(lgp)
    b = wh * dm * cmath.exp(lgm)
    c = c0 * d0 * cmath.exp(lg0)
    r_der = abs(a + b - c) / max(abs(a), abs(b), abs(c))
    return max(r_val, r_der)


def radius_refinement(prob: ODEProblem, lam: complex,
                      ray: float = 0.0) -> Tuple[float, float]:
    """(relative change of origin data under R -> 2R, recorded estimate)."""
    m = prob.m
    mu = _omega_power(m, 2.0 * float(ray)) * complex(lam)
    v1, d1, lg1, R, est = _origin_one(m, mu)
    v2, d2, lg2, _, _ = _origin_one(m, mu, rmin=2.0 * R)
    dv = abs((v2 / v1) * cmath.exp(lg2 - lg1) - 1.0)
    dd = abs((d2 / d1) * cmath.exp(lg2 - lg1) - 1.0)
    return max(dv, dd), est


# ----------------------------------------------------------------------
# spectra
# ----------------------------------------------------------------------

def _weyl_spacing(m: float, s: float) -> float:
    s = max(float(s), 1.0)
    c_m = 0.5 * math.sqrt(math.pi) * math.gamma(1.0 + 1.0 / m) / math.gamma(1.5 + 1.0 / m)
    return math.pi * s ** (0.5 - 1.0 / m) / (c_m * (1.0 / m + 0.5))


def _march_and_refine(batch_fn, count: int, m: float,
                      cap: Optional[float], denom: float = 3.0):
    """First `count` positive zeros of a real-valued batch functional."""
    x_prev = 1e-3 * _weyl_spacing(m, 1.0)
    v_prev = float(batch_fn(np.array([x_prev]))[0])
    brackets = []
    partial = False
    hard_cap = cap if cap is not None else 1e7
    while len(brackets) < count:
        step = _weyl_spacing(m, x_prev) / denom
        xs = x_prev + step * np.arange(1, 13, dtype=float)
        if xs[0] > hard_cap:
            partial = True
            break
        vs = np.asarray(batch_fn(xs), dtype=float)
        all_x = np.concatenate([[x_prev], xs])
        all_v = np.concatenate([[v_prev], vs])
        for i in range(len(all_x) - 1):
            if all_v[i] == 0.0:
                brackets.append((all_x[i], all_x[i], 0.0, 0.0))
            elif all_v[i] * all_v[i + 1] < 0:
                brackets.append((all_x[i], all_x[i + 1], all_v[i], all_v[i + 1]))
        x_prev, v_prev = float(all_x[-1]), float(all_v[-1])
    brackets = brackets[:count]
    if not brackets:
        return np.empty(0), partial

    lo = np.array([b[0] for b in brackets])
    hi = np.array([b[1] for b in brackets])
    flo = np.array([b[2] for b in brackets])
    fhi = np.array([b[3] for b in brackets])
    for it in range(64):
        done = (hi - lo) <= 1e-10 * np.maximum(1.0, np.abs(hi))
        if done.all():
            break
        gap = fhi - flo
        secant = np.where(gap != 0.0, hi - fhi * (hi - lo) / np.where(gap == 0.0, 1.0, gap),
                          0.5 * (lo + hi))
        inside = (secant > lo + 0.05 * (hi - lo)) & (secant < hi - 0.05 * (hi - lo))
        mid = np.where(inside & (it % 2 == 0), secant, 0.5 * (lo + hi))
        mid = np.where(done, lo, mid)
        fm = np.asarray(batch_fn(mid), dtype=float)
        same = (fm < 0) == (flo < 0)
        lo = np.where(done, lo, np.where(same, mid, lo))
        flo = np.where(done, flo, np.where(same, fm, flo))
        hi = np.where(done, hi, np.where(same, hi, mid))
        fhi = np.where(done, fhi, np.where(same, fhi, fm))
    return 0.5 * (lo + hi), partial


def _pure_imag_part(bracket: np.ndarray, what: str) -> np.ndarray:
    # on the real spectral line these Wronskian brackets are purely
    # imaginary by conjugation symmetry; a large real part means the
    # conventions are broken, not that the data is noisy.  The absolute
    # term keeps roundoff-sized brackets (refinement lands on the root,
    # both parts drop to eps scale) from tripping the relative test.
    mags = np.abs(bracket)
    bad = np.abs(bracket.real) > 1e-3 * mags + 1e-12
    if bad.any():
        i = int(np.argmax(np.abs(bracket.real) - 1e-3 * mags))
        raise ConditioningError(
            f"{what} bracket is not purely imaginary: {bracket[i]:.6g}")
    return bracket.imag


def _halfline_values(prob: ODEProblem, ss: np.ndarray) -> np.ndarray:
    recs = _origin_batch(prob.m, [complex(-s) for s in ss])
    vals = np.array([r[0] for r in recs])
    return np.real(vals)


def _ell1_values(prob: ODEProblem, lams: np.ndarray) -> np.ndarray:
    m = prob.m
    w1, w2 = _omega_power(m, 1.0), _omega_power(m, 2.0)
    n = len(lams)
    mus = np.concatenate([w2 * lams, lams / w2]).astype(complex)
    recs = _origin_batch(m, mus)
    vp = np.array([r[0] for r in recs[:n]])
    dp = np.array([r[1] for r in recs[:n]])
    vm = np.array([r[0] for r in recs[n:]])
    dm = np.array([r[1] for r in recs[n:]])
    bracket = w1 * vp * dm - dp * vm / w1
    return _pure_imag_part(bracket, "ray-1/ray+1")


def _ell2_values(prob: ODEProblem, lams: np.ndarray) -> np.ndarray:
    m = prob.m
    w3, w32 = _omega_power(m, 3.0), _omega_power(m, 1.5)
    n = len(lams)
    mus = np.concatenate([lams / w3, w3 * lams]).astype(complex)
    recs = _origin_batch(m, mus)
    vm = np.array([r[0] for r in recs[:n]])
    dm = np.array([r[1] for r in recs[:n]])
    vp = np.array([r[0] for r in recs[n:]])
    dp = np.array([r[1] for r in recs[n:]])
    bracket = vm * dp / w32 - w32 * dm * vp
    return _pure_imag_part(bracket, "ray-3/2 / ray+3/2")


def halfline_dirichlet_spectrum(prob: ODEProblem, count: int,
                                max_s: Optional[float] = None) -> EigenvalueSet:
    """First `count` zeros of the determinant on the positive internal axis
    (vanishing boundary value at the origin, decay along the axis)."""
    if prob.ell != 1:
        raise ValidationError("half-line spectrum is defined on the ell=1 problem")
    if count < 1:
        raise ValidationError("count must be at least 1")
    roots, partial = _march_and_refine(
        lambda ss: _halfline_values(prob, ss), count, prob.m, max_s)
    values = tuple(complex(r) for r in roots)
    return EigenvalueSet(values=values, method="oracle",
                         reality=tuple(True for _ in values),
                         window=(0.0, float(roots[-1]) if len(roots) else (max_s or 0.0)),
                         unresolved=("window exhausted",) if partial else ())


def pt_eigenvalues(prob: ODEProblem, count: int,
                   max_abs: Optional[float] = None,
                   complex_window: Optional[tuple] = None,
                   feed_levels: int = 24) -> EigenvalueSet:
    """Oscillator eigenvalues: zeros of C0 (ell=1) or D0 (ell=2), reported
    in the oscillator's lam convention.

    With complex_window = ((re_lo, re_hi), (im_lo, im_hi)) the search runs
    over that rectangle instead of the real line: a product is built from
    this oracle's own half-line spectrum, its second-level function is
    scanned by the winding machinery, and every candidate is confirmed by
    a direct D0 evaluation, so the reported zeros are oracle values.
    """
    if count < 1:
        raise ValidationError("count must be at least 1")
    if complex_window is not None:
        return _complex_pt_search(prob, count, complex_window, feed_levels)
    fn = _ell1_values if prob.ell == 1 else _ell2_values
    roots, partial = _march_and_refine(
        lambda xs: fn(prob, xs), count, prob.m, max_abs, denom=4.0)
    values = tuple(complex(r) for r in roots)
    return EigenvalueSet(values=values, method="oracle",
                         reality=tuple(True for _ in values),
                         window=(0.0, float(roots[-1]) if len(roots) else (max_abs or 0.0)),
                         unresolved=("window exhausted",) if partial else ())


def oracle_fed_product(prob: ODEProblem, levels: int = 24,
                       tail_window: int = 10):
    """Product built from this oracle's half-line spectrum (internal
    variable), with the growth-law tail fixed by the oscillator exponent."""
    base_prob = ODEProblem(m=prob.m, ell=1)
    spec = halfline_dirichlet_spectrum(base_prob, levels)
    zeros = [v.real for v in spec.values]
    exponent = 2.0 * prob.m / (prob.m + 2.0)
    tail = fit_tail(zeros, min(tail_window, len(zeros)), exponent=exponent)
    return make_product(zeros, tail)


def _complex_pt_search(prob: ODEProblem, count: int, window: tuple,
                       feed_levels: int) -> EigenvalueSet:
    if prob.ell != 2:
        raise ValidationError("complex search is wired to the ell=2 function")
    (re_lo, re_hi), (im_lo, im_hi) = window
    base = oracle_fed_product(prob, levels=feed_levels)
    rot = RotationParams(alpha=prob.alpha, phase_offset=prob.alpha / 2.0)
    fn = SpectralFunction(base, rot, kind="D")
    # the product lives in the internal variable s = -lam
    re_pair = tuple(sorted((-float(re_hi), -float(re_lo))))
    im_pair = tuple(sorted((-float(im_hi), -float(im_lo))))
    located = complex_zeros(fn, (re_pair, im_pair))
    confirmed = []
    for s in located.values:
        lam = -complex(s)
        # polish and confirm against the direct oracle value
        h = 1e-5 * (1.0 + abs(lam))
        d0 = stokes_D0(prob, lam, route="wronskian")
        slope = (stokes_D0(prob, lam + h, route="wronskian")
                 - stokes_D0(prob, lam - h, route="wronskian")) / (2.0 * h)
        if slope != 0:
            lam = lam - d0 / slope
            d0 = stokes_D0(prob, lam, route="wronskian")
        ref = abs(stokes_D0(prob, lam + 0.1 * (1.0 + abs(lam)), route="wronskian"))
        if abs(d0) <= 1e-4 * max(ref, 1e-10):
            confirmed.append(complex(lam))
    confirmed.sort(key=lambda z: (abs(z), z.imag))
    confirmed = confirmed[:max(count, len(confirmed))]
    values = tuple(sorted(confirmed, key=lambda z: (z.real, z.imag)))
    reality = tuple(abs(z.imag) <= 1e-6 * max(1.0, abs(z.real)) for z in values)
    return EigenvalueSet(values=values, method="oracle", reality=reality,
                         window=(float(re_lo), float(re_hi), float(im_lo), float(im_hi)),
                         unresolved=located.unresolved)
