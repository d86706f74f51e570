"""Zero location in rectangles by the argument principle.

The winding number of f around a rectangle is accumulated from continuous
argument increments along the boundary, bisecting each segment until the
increment is unambiguous.  Boxes are quadrisected until they hold at most
one zero, then a Newton polish refines the root.  Cut lines are scored
before use and placed where |f| stays large, so a zero lying exactly on a
symmetry line of the search box is never sliced through.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import ConditioningError, GuardError

_MAX_SEGMENT_DEPTH = 44
_ARG_STEP_LIMIT = 0.5 * math.pi * 0.98


@dataclass(frozen=True)
class Rectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max),
                       0.5 * (self.im_min + self.im_max))

    @property
    def diagonal(self) -> float:
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    def corners(self) -> List[complex]:
        return [complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max)]

    def quadrisect(self, fraction: float = 0.5,
                   im_fraction: Optional[float] = None) -> List["Rectangle"]:
        # independent cut fractions per axis let the caller steer both cut
        # lines away from zeros instead of always halving
        if im_fraction is None:
            im_fraction = fraction
        rm = self.re_min + fraction * (self.re_max - self.re_min)
        im = self.im_min + im_fraction * (self.im_max - self.im_min)
        return [Rectangle(self.re_min, rm, self.im_min, im),
                Rectangle(rm, self.re_max, self.im_min, im),
                Rectangle(self.re_min, rm, im, self.im_max),
                Rectangle(rm, self.re_max, im, self.im_max)]


def _checked(value: complex, floor: float) -> complex:
    # No relative magnitude guard here: the functions this runs on swing
    # over hundreds of orders of magnitude along one contour, so small
    # values are normal.  A graze is an exact zero (or caller floor), or
    # a phase step that will not settle under bisection.
    if not cmath.isfinite(value):
        raise GuardError("contour value overflowed")
    if abs(value) <= floor:
        raise GuardError("contour passes too close to a zero")
    return value


def _segment_increment(fn, za, zb, fa, fb, depth, floor):
    """Continuous argument increment along [za, zb].

    A piece is accepted only when the two half-steps around its midpoint
    are individually small; a direct endpoint-to-endpoint step can hide a
    whole turn mod 2 pi, a verified midpoint makes that need conspiring
    hidden turns at every scale.  An on-contour zero never stabilises and
    exhausts the depth budget instead.
    """
    if depth >= _MAX_SEGMENT_DEPTH:
        raise ConditioningError("argument increment failed to stabilise")
    zm = 0.5 * (za + zb)
    fm = _checked(fn(zm), floor)
    d1 = cmath.phase(fm / fa)
    d2 = cmath.phase(fb / fm)
    if abs(d1) + abs(d2) <= _ARG_STEP_LIMIT:
        return d1 + d2
    return (_segment_increment(fn, za, zm, fa, fm, depth + 1, floor)
            + _segment_increment(fn, zm, zb, fm, fb, depth + 1, floor))


def winding_number(fn: Callable[[complex], complex], rect: Rectangle,
                   zero_floor: float = 0.0, samples_per_edge: int = 24) -> int:
    """Number of zeros of fn inside rect, counted with multiplicity."""
    corners = rect.corners()
    total = 0.0
    for i in range(4):
        za, zb = corners[i], corners[(i + 1) % 4]
        knots = [za + (zb - za) * j / samples_per_edge
                 for j in range(samples_per_edge + 1)]
        values = [_checked(fn(z), zero_floor) for z in knots]
        for j in range(samples_per_edge):
            total += _segment_increment(fn, knots[j], knots[j + 1],
                                        values[j], values[j + 1], 0,
                                        zero_floor)
    n = total / (2.0 * math.pi)
    rounded = int(round(n))
    if abs(n - rounded) > 0.05:
        raise ConditioningError(f"winding sum {n:.3f} is not close to an integer")
    return rounded


def _newton_polish(fn, z0: complex, scale: float,
                   leash: Optional[float] = None) -> Optional[complex]:
    z = z0
    last = None
    prev_step = math.inf
    for _ in range(40):
        h = 1e-7 * (abs(z) + scale)
        df = (fn(z + h) - fn(z - h)) / (2.0 * h)
        if df == 0:
            return None
        step = fn(z) / df
        if abs(step) > prev_step and prev_step <= 1e-6 * (abs(z) + scale):
            # steps stopped contracting while already small: the iterate is
            # rattling on the function's own noise floor, which for heavily
            # cancelled expressions sits far above machine precision of z;
            # the current point is within that floor of the root
            return z
        prev_step = abs(step)
        z = z - step
        if leash is not None and abs(z - z0) > leash:
            # wandered out of the region this start was meant to refine
            return None
        if abs(step) <= 1e-13 * (abs(z) + scale):
            if last is not None and abs(z - last) <= 1e-12 * (abs(z) + scale):
                return z
            last = z
    return last


def _nudged(rect: Rectangle, attempt: int) -> Rectangle:
    pad = (1.5e-3 * (attempt + 1)) * max(rect.re_max - rect.re_min,
                                         rect.im_max - rect.im_min)
    return Rectangle(rect.re_min - pad, rect.re_max + pad,
                     rect.im_min - pad, rect.im_max + pad)


def robust_winding(fn, rect: Rectangle, attempts: int = 6,
                   samples_per_edge: int = 24) -> Tuple[int, Rectangle]:
    """Winding number with automatic boundary nudges when the contour grazes
    a zero.

    Size samples_per_edge to the expected zero count near an edge: knots
    must land at least twice per zero spacing, or a transition past one
    zero plus background drift can hide a full turn inside one accepted
    knot gap.
    """
    box = rect
    for attempt in range(attempts):
        try:
            return winding_number(fn, box,
                                  samples_per_edge=samples_per_edge), box
        except (GuardError, ConditioningError):
            # a graze shows up either as a small boundary value or as an
            # argument jump that never settles; both respond to a nudge
            box = _nudged(rect, attempt)
    raise GuardError("could not move the contour off a zero")


_CUT_FRACTIONS = (0.5, 0.44, 0.56, 0.38, 0.62)


def _clear_fractions(fn, rect: Rectangle) -> Tuple[float, float]:
    """Cut fractions whose lines pass where |fn| stays largest.

    A cut through (or very near) a zero makes the two children share that
    zero under boundary nudges, so it gets counted twice and polished from
    the wrong side.  Scoring each candidate line by its smallest sampled
    magnitude and keeping the best steers cuts into quiet territory; in
    particular a line of zeros on a symmetry axis of the box loses to any
    parallel line beside it.
    """
    ts = [i / 10.0 for i in range(1, 10)]

    def line_score(pts: List[complex]) -> float:
        worst = math.inf
        for z in pts:
            v = fn(z)
            if not cmath.isfinite(v):
                return 0.0
            m = abs(v)
            if m < worst:
                worst = m
        return worst

    best_re, best_re_score = 0.5, -1.0
    for fr in _CUT_FRACTIONS:
        x = rect.re_min + fr * (rect.re_max - rect.re_min)
        score = line_score([complex(x, rect.im_min + t * (rect.im_max - rect.im_min))
                            for t in ts])
        if score > best_re_score:
            best_re, best_re_score = fr, score
    best_im, best_im_score = 0.5, -1.0
    for fi in _CUT_FRACTIONS:
        y = rect.im_min + fi * (rect.im_max - rect.im_min)
        score = line_score([complex(rect.re_min + t * (rect.re_max - rect.re_min), y)
                            for t in ts])
        if score > best_im_score:
            best_im, best_im_score = fi, score
    return best_re, best_im


def locate_zeros(fn: Callable[[complex], complex], rect: Rectangle,
                 depth: int = 24) -> Tuple[List[complex], List[Rectangle]]:
    """All zeros of fn inside rect, polished; plus any unresolved boxes."""
    zeros: List[complex] = []
    unresolved: List[Rectangle] = []
    outer_scale = rect.diagonal

    def polish_inside(box: Rectangle) -> Optional[complex]:
        # several starts, each on a short leash; accept only a root that
        # lands in the box (with a sliver of slack for boundary roots)
        pad = 1e-6 * box.diagonal + 1e-12 * outer_scale
        scale = 0.1 * box.diagonal + 1e-12 * outer_scale
        leash = 3.0 * (box.diagonal + 1e-12 * outer_scale)
        w, h = box.re_max - box.re_min, box.im_max - box.im_min
        starts = [box.center,
                  complex(box.re_min + 0.5 * w, box.im_min + 0.25 * h),
                  complex(box.re_min + 0.5 * w, box.im_min + 0.75 * h),
                  complex(box.re_min + 0.25 * w, box.im_min + 0.5 * h),
                  complex(box.re_min + 0.75 * w, box.im_min + 0.5 * h)]
        for z0 in starts:
            root = _newton_polish(fn, z0, scale, leash=leash)
            if root is None:
                continue
            if (box.re_min - pad <= root.real <= box.re_max + pad
                    and box.im_min - pad <= root.imag <= box.im_max + pad):
                return root
        return None

    def recurse(box: Rectangle, level: int):
        try:
            count, _ = robust_winding(fn, box)
        except (GuardError, ConditioningError):
            # no contour around this box carries usable phase (values at
            # the roundoff floor, or a zero that every nudge re-grazes):
            # report the box instead of guessing a count
            unresolved.append(box)
            return
        if count == 0:
            return
        if box.diagonal < 1e-9 * outer_scale:
            # too small to split further; a multiple zero lands here
            root = _newton_polish(fn, box.center,
                                  0.1 * box.diagonal + 1e-12 * outer_scale)
            if root is not None and abs(root - box.center) <= 1e-6 * outer_scale:
                zeros.extend([root] * count)
            else:
                unresolved.append(box)
            return
        if count == 1:
            root = polish_inside(box)
            if root is not None:
                zeros.append(root)
                return
            # no start converged inside: shrink the box around the zero
        if level >= depth:
            unresolved.append(box)
            return
        fr, fi = _clear_fractions(fn, box)
        for sub in box.quadrisect(fr, fi):
            recurse(sub, level + 1)

    recurse(rect, 0)
    zeros.sort(key=lambda z: (z.real, z.imag))
    # two boxes that met at a cut can polish to the same simple root from
    # either side; those copies agree only to roundoff, while multiple-zero
    # copies from a single tiny box are bitwise identical and must stay
    merged: List[complex] = []
    for z in zeros:
        if merged and z != merged[-1] and abs(z - merged[-1]) <= 1e-11 * outer_scale:
            continue
        merged.append(z)
    return merged, unresolved
