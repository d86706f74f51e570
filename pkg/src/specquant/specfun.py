"""Stokes functions built from a product, their zeros, and reality checks.

C is assembled from the product through the three-term relation
C(lam) f(lam) = k f(w^2 lam) + k^{-1} f(w^{-2} lam) with w = e^{i alpha},
k = e^{i phi}; D follows either as C(w^{-1} lam) C(w lam) - 1 or directly
from ratios of f.  For converged data both are entire even though each
formula is a ratio, so evaluation inside the pole guard of a stored zero
switches to a derivative-ratio limit.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .errors import (ConditioningError, DomainError, GuardError,
                     PoleGuardError, ValidationError)
from .products import (EntireProduct, RotationParams, eval_derivative,
                       eval_product, modulus_profile)
from .winding import Rectangle, locate_zeros, robust_winding

_GUARD_REL = 1e-12
_REALITY_TOL = 1e-6

D_ROUTE_VIA_C = "via-C"
D_ROUTE_VIA_F = "via-f"


def _rot(alpha: float, n: float) -> complex:
    return cmath.exp(1j * alpha * n)


def _kpow(phi: float, x: float) -> complex:
    """k^x for k = e^{i phi}; the branch follows phi, not the principal arg."""
    return cmath.exp(1j * phi * x)


# ----------------------------------------------------------------------
# result containers
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class EigenvalueSet:
    """Zeros located by one of the engines, sorted by real part."""

    values: Tuple[complex, ...]
    method: str                       # scheme | specfun | oracle
    reality: Tuple[bool, ...]
    window: tuple
    reality_tolerance: float = _REALITY_TOL
    suspect_multiple: Tuple[bool, ...] = ()
    unresolved: tuple = ()

    def __post_init__(self):
        if self.method not in ("scheme", "specfun", "oracle"):
            raise ValidationError(f"unknown method tag: {self.method}")
        if len(self.reality) != len(self.values):
            raise ValidationError("reality flags must match values one-to-one")
        res = [complex(v).real for v in self.values]
        if any(res[i] > res[i + 1] for i in range(len(res) - 1)):
            raise ValidationError("values must be sorted by real part")
        for v, flag in zip(self.values, self.reality):
            if flag and abs(complex(v).imag) > self.reality_tolerance * max(1.0, abs(complex(v).real)):
                raise ValidationError("value flagged real has a large imaginary part")

    def __len__(self):
        return len(self.values)

    @property
    def real_values(self) -> Tuple[float, ...]:
        return tuple(complex(v).real for v, f in zip(self.values, self.reality) if f)

    @property
    def all_real(self) -> bool:
        return all(self.reality)


@dataclass(frozen=True)
class RayClassification:
    """Nearest ray arg = j * alpha, j in {-1, 0, 1}, and the angular miss."""

    point: complex
    ray: int
    deviation: float


def classify_ray(point: complex, alpha: float) -> RayClassification:
    ang = cmath.phase(complex(point))
    best = min((-1, 0, 1), key=lambda j: abs(ang - j * alpha))
    return RayClassification(point=complex(point), ray=best,
                             deviation=abs(ang - best * alpha))


# ----------------------------------------------------------------------
# evaluators
# ----------------------------------------------------------------------

def _nearest_stored_zero(P: EntireProduct, lam: complex) -> Optional[int]:
    if len(P.zeros) == 0:
        return None
    i = int(np.argmin(np.abs(lam - P.zeros)))
    if abs(lam - P.zeros[i]) <= _GUARD_REL * P.zeros[i]:
        return i
    return None


def stokes_C(base: EntireProduct, rot: RotationParams, lam: complex,
             limit: bool = False) -> complex:
    """C(lam) = (k f(w^2 lam) + k^{-1} f(w^{-2} lam)) / f(lam).

    Inside the pole guard of a stored zero the formula is 0/0 for converged
    data; limit mode evaluates the derivative ratio there instead.
    """
    lam = complex(lam)
    phi = rot.phase_offset
    w2, wm2 = _rot(rot.alpha, 2), _rot(rot.alpha, -2)
    hit = _nearest_stored_zero(base, lam)
    if hit is not None:
        if not limit:
            raise PoleGuardError(
                f"argument lies within {_GUARD_REL:g} relative of stored zero "
                f"number {hit + 1}; request limit mode")
        e = complex(base.zeros[hit])
        num = (_kpow(phi, 1) * w2 * eval_derivative(base, w2 * e)
               + _kpow(phi, -1) * wm2 * eval_derivative(base, wm2 * e))
        return num / eval_derivative(base, e)
    num = (_kpow(phi, 1) * eval_product(base, w2 * lam)
           + _kpow(phi, -1) * eval_product(base, wm2 * lam))
    return num / eval_product(base, lam)


def _d_guard(base: EntireProduct, rot: RotationParams, lam: complex, route: str):
    # both routes divide by f(w^{-1} lam) f(w lam), whose zeros sit on the
    # rays arg = +-alpha at radius E_j
    if len(base.zeros) == 0:
        return
    for sgn in (1, -1):
        pts = base.zeros * _rot(rot.alpha, sgn)
        d = np.abs(lam - pts)
        j = int(np.argmin(d))
        if d[j] <= _GUARD_REL * base.zeros[j]:
            raise PoleGuardError(
                f"route {route}: argument within pole guard of rotated zero "
                f"number {j + 1} on ray {sgn:+d}")


def stokes_D(base: EntireProduct, rot: RotationParams, lam: complex,
             route: str = D_ROUTE_VIA_C) -> complex:
    """D(lam), either as C(w^{-1} lam) C(w lam) - 1 or directly from f."""
    lam = complex(lam)
    _d_guard(base, rot, lam, route)
    w1, wm1 = _rot(rot.alpha, 1), _rot(rot.alpha, -1)
    if route == D_ROUTE_VIA_C:
        return stokes_C(base, rot, wm1 * lam) * stokes_C(base, rot, w1 * lam) - 1.0
    if route == D_ROUTE_VIA_F:
        phi = rot.phase_offset
        f_m3 = eval_product(base, _rot(rot.alpha, -3) * lam)
        f_m1 = eval_product(base, wm1 * lam)
        f_p1 = eval_product(base, w1 * lam)
        f_p3 = eval_product(base, _rot(rot.alpha, 3) * lam)
        num = (_kpow(phi, -2) * f_m3 * f_m1 + _kpow(phi, 2) * f_p3 * f_p1
               + f_m3 * f_p3)
        return num / (f_m1 * f_p1)
    raise ValidationError(f"unknown D route: {route}")


@dataclass(frozen=True)
class SpectralFunction:
    """Callable view of C or D over a fixed product and rotation."""

    base: EntireProduct
    rot: RotationParams
    kind: str = "C"
    route: str = D_ROUTE_VIA_C

    def __post_init__(self):
        if self.kind not in ("C", "D"):
            raise ValidationError(f"kind must be 'C' or 'D', got {self.kind!r}")
        if self.route not in (D_ROUTE_VIA_C, D_ROUTE_VIA_F):
            raise ValidationError(f"unknown D route: {self.route!r}")

    def __call__(self, lam: complex) -> complex:
        if self.kind == "C":
            try:
                return stokes_C(self.base, self.rot, lam)
            except PoleGuardError:
                return stokes_C(self.base, self.rot, lam, limit=True)
        return stokes_D(self.base, self.rot, lam, route=self.route)


def identity_residual(base: EntireProduct, rot: RotationParams, lam: complex,
                      which: str = "weighted") -> float:
    """Normalized residual of a three-step consistency identity.

    "plain":    f(w^-3 lam) = D(lam) f(w lam) - C(w^-1 lam) f(w^3 lam),
                exact when the phase factor k is 1;
    "weighted": k^-3/2 f(w^-3 lam) + C(w^-1 lam) k^3/2 f(w^3 lam)
                = D(lam) k^1/2 f(w lam), exact for any unimodular k.

    Returns |LHS - RHS| normalized by the largest quantity the evaluation
    manipulates.  That includes C(w^-1 lam) C(w lam) f(w lam), not just the
    final three terms: in the sector where D is exponentially small the
    subtraction in D = C C - 1 leaves roundoff of size eps |C C|, and the
    D term inherits eps |C C f(w lam)| no matter how the identity itself
    is arranged.  Dividing by the final terms alone would report failure
    wherever |D f| collapses below that floor.
    """
    lam = complex(lam)
    a, phi = rot.alpha, rot.phase_offset
    f_m3 = eval_product(base, _rot(a, -3) * lam)
    f_p3 = eval_product(base, _rot(a, 3) * lam)
    f_p1 = eval_product(base, _rot(a, 1) * lam)
    c_m1 = stokes_C(base, rot, _rot(a, -1) * lam)
    c_p1 = stokes_C(base, rot, _rot(a, 1) * lam)
    d_0 = c_m1 * c_p1 - 1.0
    cond = abs(c_m1 * c_p1 * f_p1)
    if which == "plain":
        terms = (f_m3, d_0 * f_p1, c_m1 * f_p3)
        gap = f_m3 - (d_0 * f_p1 - c_m1 * f_p3)
    elif which == "weighted":
        t1 = _kpow(phi, -1.5) * f_m3
        t2 = c_m1 * _kpow(phi, 1.5) * f_p3
        t3 = d_0 * _kpow(phi, 0.5) * f_p1
        terms = (t1, t2, t3)
        gap = (t1 + t2) - t3
    else:
        raise ValidationError(f"unknown identity selector: {which!r}")
    return abs(gap) / (1.0 + max(cond, max(abs(t) for t in terms)))


# ----------------------------------------------------------------------
# zero location
# ----------------------------------------------------------------------

def _refine_bracket(fn, lo: float, hi: float, f_lo: float) -> float:
    """Bisect a sign change down to 1e-10 relative width."""
    neg = f_lo < 0
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if (hi - lo) <= 1e-10 * max(1.0, abs(mid)):
            break
        fm = float(np.real(fn(mid)))
        if fm == 0.0:
            return mid
        if (fm < 0) == neg:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def real_zeros(fn, interval, grid: int = 800,
               method: str = "specfun") -> EigenvalueSet:
    """Sign-change scan plus bisection on a real interval.

    Sign flips caused by poles of the defining ratio (possible for data
    that does not satisfy the three-term relation) are rejected by a
    magnitude test: at a zero the refined value collapses, at a pole it
    blows up.
    """
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValidationError("interval must satisfy a < b")
    if grid < 2:
        raise ValidationError("grid must have at least 2 cells")

    if isinstance(fn, SpectralFunction) and fn.kind == "D":
        for sgn in (1, -1):
            pts = fn.base.zeros * _rot(fn.rot.alpha, sgn)
            on_line = ((np.abs(pts.imag) <= _GUARD_REL * fn.base.zeros)
                       & (pts.real >= a) & (pts.real <= b))
            if np.any(on_line):
                other = D_ROUTE_VIA_F if fn.route == D_ROUTE_VIA_C else D_ROUTE_VIA_C
                raise GuardError(
                    f"interval contains a pole-guard point of route {fn.route}; "
                    f"try route {other}")

    xs = np.linspace(a, b, grid + 1)
    vals = np.array([complex(fn(x)) for x in xs])
    off_axis = np.abs(vals.imag) > 1e-8 * (1.0 + np.abs(vals))
    if off_axis.any():
        i = int(np.argmax(off_axis))
        raise ValidationError(
            f"function is not real on the interval: value {vals[i]:.6g} at {xs[i]:.6g}")
    re = vals.real

    roots: List[float] = []
    flags: List[bool] = []
    for i in range(grid):
        fa, fb = re[i], re[i + 1]
        if fa == 0.0:
            root = xs[i]
        elif fa * fb < 0:
            root = _refine_bracket(fn, xs[i], xs[i + 1], fa)
            # pole rejection: a refined zero collapses the magnitude
            if abs(complex(fn(root))) > 1e-3 * min(abs(fa), abs(fb)):
                continue
        else:
            continue
        h = 1e-6 * (1.0 + abs(root))
        deriv = (complex(fn(root + h)) - complex(fn(root - h))) / (2.0 * h)
        cell_scale = max(abs(fa), abs(fb), 1e-300)
        flags.append(abs(deriv) * (xs[i + 1] - xs[i]) < 1e-6 * cell_scale)
        roots.append(float(root))
    if re[-1] == 0.0:
        roots.append(float(xs[-1]))
        flags.append(False)

    order = np.argsort(roots)
    values = tuple(complex(roots[i]) for i in order)
    return EigenvalueSet(values=values, method=method,
                         reality=tuple(True for _ in values),
                         window=(a, b),
                         suspect_multiple=tuple(bool(flags[i]) for i in order))


def _as_rectangle(rectangle) -> Rectangle:
    if isinstance(rectangle, Rectangle):
        return rectangle
    (re0, re1), (im0, im1) = rectangle
    return Rectangle(float(re0), float(re1), float(im0), float(im1))


def complex_zeros(fn, rectangle, depth: int = 24,
                  method: str = "specfun") -> EigenvalueSet:
    """Zeros inside a rectangle by winding count and quadrisection.

    Boxes whose count never stabilises are returned in `unresolved`
    rather than raising, so the result may be partial.
    """
    rect = _as_rectangle(rectangle)
    found, unresolved = locate_zeros(fn, rect, depth=depth)
    values = tuple(sorted((complex(z) for z in found),
                          key=lambda z: (z.real, z.imag)))
    reality = tuple(abs(z.imag) <= _REALITY_TOL * max(1.0, abs(z.real))
                    for z in values)
    return EigenvalueSet(values=values, method=method, reality=reality,
                         window=(rect.re_min, rect.re_max, rect.im_min, rect.im_max),
                         unresolved=tuple(unresolved))


# ----------------------------------------------------------------------
# structural checks
# ----------------------------------------------------------------------

@dataclass
class ClauseResult:
    status: str                        # passed | failed | skipped
    margin: float = math.nan
    witness: object = None
    reason: str = ""


@dataclass
class PropositionReport:
    clauses: dict
    c_zeros: Optional[EigenvalueSet] = None
    d_zeros: Optional[EigenvalueSet] = None
    window: float = math.nan

    @property
    def all_passed(self) -> bool:
        return all(c.status in ("passed", "skipped") for c in self.clauses.values())


def _default_window(base: EntireProduct, window) -> float:
    n = len(base.zeros)
    if n == 0:
        raise ValidationError("product has no stored zeros")
    return float(window) if window is not None else float(base.zeros[max(0, (n - 1) // 2)])


def verify_proposition(base: EntireProduct, rot: RotationParams,
                       window: Optional[float] = None,
                       grid: Optional[int] = None) -> PropositionReport:
    """Check the five reality clauses on located zeros of C and D.

    The D-zero modulus clause only makes sense for alpha <= pi/3 and is
    skipped (not failed) outside that range.  Clause failures are recorded
    with a witness; no exception is raised for them.
    """
    n = len(base.zeros)
    W = _default_window(base, window)
    cells = int(grid) if grid is not None else max(600, 12 * n)
    clauses = {}
    fn_c = SpectralFunction(base, rot, kind="C")
    fn_d = SpectralFunction(base, rot, kind="D")

    # (i) every zero of C in the window is real and negative; audited by
    # winding counts on a thin strip and on a taller box
    c_set = real_zeros(fn_c, (-W, 0.0), cells)
    neg = [v.real for v in c_set.values]
    try:
        h = 1e-3 * W
        H = 0.45 * W
        # the thin strip runs right through the zero train, so its edges
        # need knots denser than the zero spacing to keep every turn
        spe = max(24, 4 * len(neg))
        strip, _ = robust_winding(fn_c, Rectangle(-W, 0.0, -h, h),
                                  samples_per_edge=spe)
        tall, _ = robust_winding(fn_c, Rectangle(-W, 0.0, -H, H),
                                 samples_per_edge=spe)
        pos, _ = robust_winding(fn_c, Rectangle(0.0, W, -H, H),
                                samples_per_edge=spe)
        audit_ok = (strip == len(neg)) and (tall == strip) and (pos == 0)
        audit_msg = f"strip={strip} tall={tall} located={len(neg)} positive-side={pos}"
    except (GuardError, ConditioningError) as exc:
        audit_ok, audit_msg = False, f"winding audit failed: {exc}"
    all_negative = all(v < 0 for v in neg)
    clauses["c_zeros_negative"] = ClauseResult(
        status="passed" if (all_negative and audit_ok) else "failed",
        margin=(-max(neg) if neg else math.inf),
        witness=None if (all_negative and audit_ok) else (neg, audit_msg),
        reason=audit_msg)

    # (ii) |f(w^2 z)| = |f(w^-2 z)| at each located C-zero
    if len(c_set):
        devs = []
        for v in c_set.values:
            m_plus = abs(eval_product(base, _rot(rot.alpha, 2) * v))
            m_minus = abs(eval_product(base, _rot(rot.alpha, -2) * v))
            devs.append(abs(m_plus - m_minus) / max(m_plus, m_minus))
        worst = max(devs)
        clauses["rotated_modulus_balance"] = ClauseResult(
            status="passed" if worst <= 1e-7 else "failed",
            margin=worst,
            witness=None if worst <= 1e-7 else c_set.values[int(np.argmax(devs))])
    else:
        clauses["rotated_modulus_balance"] = ClauseResult(
            status="passed", reason="no C-zeros located in the window")

    # (iii) unit modulus of C at D-zeros, only meaningful for alpha <= pi/3
    d_set = None
    if rot.alpha > math.pi / 3 + 1e-12:
        clauses["d_zero_unit_modulus"] = ClauseResult(
            status="skipped", reason="alpha outside (0, pi/3]")
    else:
        d_set = real_zeros(fn_d, (-W, 0.0), cells)
        if len(d_set):
            devs = []
            for tau in d_set.values:
                c_m = stokes_C(base, rot, _rot(rot.alpha, -1) * tau)
                c_p = stokes_C(base, rot, _rot(rot.alpha, 1) * tau)
                devs.append(max(abs(abs(c_m) - 1.0), abs(abs(c_m * c_p) - 1.0)))
            worst = max(devs)
            clauses["d_zero_unit_modulus"] = ClauseResult(
                status="passed" if worst <= 1e-6 else "failed",
                margin=worst,
                witness=None if worst <= 1e-6 else d_set.values[int(np.argmax(devs))])
        else:
            clauses["d_zero_unit_modulus"] = ClauseResult(
                status="passed", reason="no D-zeros located in the window")

    # (iv) |f(r e^{i theta})| nondecreasing in theta on (0, pi)
    radii = [0.5 * base.zeros[0]]
    if n >= 2:
        radii.append(math.sqrt(base.zeros[0] * base.zeros[1]))
    mid = max(0, (n - 1) // 2)
    if mid + 1 < n:
        radii.append(math.sqrt(base.zeros[mid] * base.zeros[mid + 1]))
    thetas = np.linspace(0.0, math.pi, 181)
    worst_drop = math.inf
    witness_pt = None
    for r in radii:
        prof = modulus_profile(base, r, thetas)
        diffs = np.diff(prof) / max(float(np.max(prof)), 1e-300)
        j = int(np.argmin(diffs))
        if diffs[j] < worst_drop:
            worst_drop = float(diffs[j])
            witness_pt = (r, float(thetas[j + 1]))
    ok = worst_drop >= -1e-12
    clauses["modulus_monotone"] = ClauseResult(
        status="passed" if ok else "failed",
        margin=worst_drop, witness=None if ok else witness_pt)

    # (v) D(x) + 1 stays above its value at 0 (= 4 cos^2 phi; 4 for k = 1)
    bound = 4.0 * math.cos(rot.phase_offset) ** 2
    xs = np.linspace(W / 50.0, W, 25)
    gaps = [float((stokes_D(base, rot, float(x)) + 1.0).real) - bound for x in xs]
    j = int(np.argmin(gaps))
    ok = gaps[j] > 0.0
    clauses["positive_axis_gap"] = ClauseResult(
        status="passed" if ok else "failed",
        margin=gaps[j], witness=None if ok else float(xs[j]),
        reason=f"threshold {bound:.12g}")

    return PropositionReport(clauses=clauses, c_zeros=c_set, d_zeros=d_set,
                             window=W)


# ----------------------------------------------------------------------
# reality witness
# ----------------------------------------------------------------------

@dataclass
class Theorem1Witness:
    evaluate: Callable[[complex], complex]
    zeros: EigenvalueSet
    one_points: EigenvalueSet
    zero_rays: List[RayClassification]
    one_point_rays: List[RayClassification]
    window: float


def _coherent_witness_window(g: Callable[[complex], complex],
                             requested: float,
                             floor: float = 1e-8) -> float:
    """Largest between-zero midpoint of g on (0, requested] where |g| still
    clears the cancellation floor.  Sign changes whose midpoints sit below
    the floor are roundoff texture, not zeros, and never win.  With fewer
    than two sign changes the window is instead capped where |g| itself
    last clears the floor: past that point the axis values are pure
    roundoff (often exactly zero) and no contour can cross them.

    Roots polish no better than roundoff over the local slope, so the
    floor also bounds how far a located zero can scatter off its ray;
    1e-8 keeps that scatter orders of magnitude inside the 1e-6 ray
    tolerance while losing only the last marginal zero or two."""
    xs = np.linspace(requested / 600.0, requested, 600)
    vals = np.array([g(x) for x in xs])
    re = vals.real
    mags = np.abs(vals)
    alive = np.nonzero(mags >= floor)[0]
    horizon = float(xs[alive[-1]]) if len(alive) else requested
    idx = np.nonzero(np.sign(re[:-1]) * np.sign(re[1:]) < 0)[0]
    if len(idx) < 2:
        return min(requested, horizon)
    crossings = 0.5 * (xs[idx] + xs[idx + 1])
    best = None
    for a, b in zip(crossings[:-1], crossings[1:]):
        mid = 0.5 * (a + b)
        if abs(g(mid)) >= floor:
            best = mid
    return float(best) if best is not None else min(requested, horizon)


def theorem1_witness(base: EntireProduct, rot: RotationParams,
                     window: Optional[float] = None,
                     depth: int = 24) -> Theorem1Witness:
    """Composite witness g(lam) = 1 - C(-w lam) C(-w^-1 lam).

    Its zeros are the reflected D-zeros (expected on the positive real ray)
    and its 1-points are the reflected C-zeros rotated onto the rays at
    angles +-alpha.  Everything found in the search box is classified by
    nearest ray; nothing is assumed about where the zeros actually are.
    """
    if not (0.0 < rot.alpha <= math.pi / 3 + 1e-12):
        raise DomainError("witness construction requires alpha in (0, pi/3]")
    a = rot.alpha
    W = _default_window(base, window)
    w1, wm1 = _rot(a, 1), _rot(a, -1)
    fn_c = SpectralFunction(base, rot, kind="C")

    def witness(lam: complex) -> complex:
        lam = complex(lam)
        return 1.0 - fn_c(-w1 * lam) * fn_c(-wm1 * lam)

    # 1 - C C cancels to the roundoff floor near the positive axis once the
    # between-zero envelope decays, so the right edge must cross the axis on
    # a between-zero midpoint where the witness is still numerically alive.
    W = _coherent_witness_window(witness, W)
    H = max(0.55, 1.08 * math.sin(a)) * W
    box = Rectangle(0.0, W, -H, H)
    zeros_found, unresolved_z = locate_zeros(witness, box, depth=depth)
    ones_found, unresolved_o = locate_zeros(lambda z: witness(z) - 1.0, box,
                                            depth=depth)

    def to_set(points, unresolved):
        values = tuple(sorted((complex(z) for z in points),
                              key=lambda z: (z.real, z.imag)))
        reality = tuple(abs(z.imag) <= _REALITY_TOL * max(1.0, abs(z.real))
                        for z in values)
        return EigenvalueSet(values=values, method="specfun", reality=reality,
                             window=(box.re_min, box.re_max, box.im_min, box.im_max),
                             unresolved=tuple(unresolved))

    zero_set = to_set(zeros_found, unresolved_z)
    one_set = to_set(ones_found, unresolved_o)
    return Theorem1Witness(
        evaluate=witness,
        zeros=zero_set,
        one_points=one_set,
        zero_rays=[classify_ray(z, a) for z in zero_set.values],
        one_point_rays=[classify_ray(z, a) for z in one_set.values],
        window=W)
