"""Scalar numerical kernels: adaptive quadrature, bracketed minimization, bisection.

Every stopping rule is relative to the size of the problem (interval width or
integral magnitude) so that results transform exactly under rescaling of the
inputs.  Absolute tolerances only act as a floor for vanishing quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import ConvergenceError, DomainError

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
INVPHI2 = 1.0 - INVPHI


@dataclass(frozen=True)
class Tolerance:
    abs: float = 1e-10
    rel: float = 1e-8
    max_iter: int = 200

    def __post_init__(self):
        if not (self.abs > 0 and self.rel > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


DEFAULT_TOL = Tolerance()


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: Tolerance = DEFAULT_TOL,
    max_depth: int = 48,
) -> float:
    """Integrate ``f`` over ``[a, b]`` with adaptive Simpson subdivision.

    An interval is accepted when the Richardson difference between the whole
    and the two halves drops below ``15 * max(abs, rel * integral of |f|)``, scaled
    to the interval's share of ``[a, b]``.  ``tol.max_iter`` bounds the number
    of accepted intervals per unit of ``max_depth`` (total budget
    ``tol.max_iter * max_depth``).
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    length = b - a
    # magnitude of the integral of |f| from a 16-panel composite rule
    grid = [abs(f(a + length * k / 16.0)) for k in range(17)]
    scale = length / 48.0 * sum(w * g for w, g in zip([1] + [4, 2] * 7 + [4, 1], grid))

    total = 0.0
    budget = tol.max_iter * max_depth
    stack = [(a, b, fa, fm, fb, whole, 0)]
    intervals = 0
    while stack:
        lo, hi, flo, fmid, fhi, est, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        h = hi - lo
        left = h / 12.0 * (flo + 4.0 * flm + fmid)
        right = h / 12.0 * (fmid + 4.0 * frm + fhi)
        diff = left + right - est
        allowed = max(tol.abs, tol.rel * scale) * (h / length)
        if abs(diff) <= 15.0 * allowed or depth >= max_depth:
            if depth >= max_depth and abs(diff) > 15.0 * allowed:
                raise ConvergenceError(f"quadrature failed to converge near x={mid:.6g}")
            total += left + right + diff / 15.0
            intervals += 1
            if intervals > budget:
                raise ConvergenceError("quadrature subdivision budget exhausted")
            continue
        stack.append((mid, hi, fmid, frm, fhi, right, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, depth + 1))
    return total


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Sequence[float] = (),
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Integral of ``f`` on ``[a, b]``, split at the supplied kinks."""
    pts = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    return sum(adaptive_simpson(f, lo, hi, tol) for lo, hi in zip(pts, pts[1:]))


def integrate_mean(
    f: Callable[[float], float],
    breakpoints: Sequence[float] = (),
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Mean value of ``f`` over ``[0, pi]``.

    Integrates in the normalized variable ``u = alpha / pi`` on ``[0, 1]``, so
    panel widths are dyadic and a constant integrand is reproduced exactly.
    """
    return integrate(lambda u: f(math.pi * u), 0.0, 1.0, [p / math.pi for p in breakpoints], tol)


def golden_section(f, lo, hi, xtol):
    """Golden-section search on ``[lo, hi]``; returns ``(x, f(x))``.

    The endpoints are compared at the end so a monotone objective returns the
    boundary exactly.
    """
    a, b = lo, hi
    c = a + INVPHI2 * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = a + INVPHI2 * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
    best = min((fc, c), (fd, d))
    for x in (lo, hi):
        fx = f(x)
        if fx <= best[0]:
            best = (fx, x)
    return best[1], best[0]


def minimize_scalar(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    seeds: int = 9,
    scan: int = 33,
    xtol: float = 1e-9,
) -> tuple[float, float]:
    """Multi-start bracketed minimization of a continuous ``f`` on ``[lo, hi]``.

    A uniform scan of ``scan`` points locates candidate brackets; the
    ``seeds`` lowest local minima of the scan are refined by golden section to
    ``xtol * (hi - lo)``.
    """
    if not hi > lo:
        raise DomainError(f"empty bracket [{lo}, {hi}]")
    n = max(scan, seeds, 3)
    xs = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    fs = [f(x) for x in xs]
    local = [
        i for i in range(n)
        if (i == 0 or fs[i] <= fs[i - 1]) and (i == n - 1 or fs[i] <= fs[i + 1])
    ]
    local.sort(key=lambda i: (fs[i], i))
    best = min(zip(fs, xs))
    for i in local[:seeds]:
        blo, bhi = xs[max(i - 1, 0)], xs[min(i + 1, n - 1)]
        x, fx = golden_section(f, blo, bhi, xtol * (hi - lo))
        if fx < best[0]:
            best = (fx, x)
    return best[1], best[0]


def minimize_2d(
    f: Callable[[float, float], float],
    box: tuple[tuple[float, float], tuple[float, float]],
    grid: int = 33,
    starts: int = 5,
    xtol: float = 1e-9,
) -> tuple[tuple[float, float], float]:
    """Minimize ``f(x, y)`` on a rectangle: grid seeding plus compass search.

    The ``starts`` best grid nodes are each refined by a bounded compass
    (pattern) search whose step shrinks from the grid spacing down to
    ``xtol`` times the box size.  The search is derivative free and tolerates
    kinks and minima on the boundary.
    """
    (x0, x1), (y0, y1) = box
    if not (x1 > x0 and y1 > y0):
        raise DomainError("degenerate box")
    n = max(grid, 3)
    xs = [x0 + (x1 - x0) * i / (n - 1) for i in range(n)]
    ys = [y0 + (y1 - y0) * j / (n - 1) for j in range(n)]
    nodes = sorted((f(x, y), i, j) for i, x in enumerate(xs) for j, y in enumerate(ys))
    best = (nodes[0][0], (xs[nodes[0][1]], ys[nodes[0][2]]))
    for _, i, j in nodes[:starts]:
        fx, pt = _compass(f, (xs[i], ys[j]), box, ((x1 - x0) / (n - 1), (y1 - y0) / (n - 1)), xtol)
        if fx < best[0]:
            best = (fx, pt)
    return best[1], best[0]


def _compass(f, start, box, steps, xtol, max_evals=20000):
    (x0, x1), (y0, y1) = box
    x, y = start
    fx = f(x, y)
    hx, hy = steps
    minx, miny = xtol * (x1 - x0), xtol * (y1 - y0)
    evals = 1
    while hx > minx or hy > miny:
        moved = False
        for dx, dy in ((hx, 0.0), (-hx, 0.0), (0.0, hy), (0.0, -hy)):
            cx = min(max(x + dx, x0), x1)
            cy = min(max(y + dy, y0), y1)
            if (cx, cy) == (x, y):
                continue
            fc = f(cx, cy)
            evals += 1
            if fc < fx:
                x, y, fx = cx, cy, fc
                moved = True
                break
        if not moved:
            hx, hy = 0.5 * hx, 0.5 * hy
        if evals > max_evals:
            raise ConvergenceError("compass search exceeded its evaluation budget")
    return fx, (x, y)


def refine_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = DEFAULT_TOL,
    ftol: float = 0.0,
    xtol: float = 1e-10,
) -> float:
    """Bisection root of ``f`` on ``[lo, hi]`` with ``f(lo) * f(hi) <= 0``.

    Stops when ``|f| <= ftol`` or the bracket is narrower than
    ``xtol * (hi - lo)``.  The returned point always lies inside ``[lo, hi]``.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise DomainError(f"no sign change on [{lo}, {hi}]")
    width = xtol * (hi - lo)
    a, b = lo, hi
    for _ in range(max(tol.max_iter, 64)):
        m = 0.5 * (a + b)
        fm = f(m)
        if abs(fm) <= ftol or fm == 0.0:
            return m
        if (fm < 0.0) == (flo < 0.0):
            a, flo = m, fm
        else:
            b = m
        if b - a <= width:
            return 0.5 * (a + b)
    raise ConvergenceError("bisection did not converge")
