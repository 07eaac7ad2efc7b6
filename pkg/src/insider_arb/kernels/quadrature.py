"""Adaptive quadrature with an optional singular endpoint."""
from __future__ import annotations

import math
import warnings
from typing import Callable

from scipy import integrate

from ..errors import ConvergenceError, DomainError

DEFAULT_ABS_TOL = 1e-8


def _quad(f, a, b, abs_tol, limit):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, epsabs=abs_tol, epsrel=0.0, limit=limit)
        except integrate.IntegrationWarning:
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(f, a, b, epsabs=abs_tol, epsrel=0.0, limit=limit)
            raise ConvergenceError(f"quadrature on [{a}, {b}] did not converge", val, err)
    return val, err


def adaptive_integral(f: Callable[[float], float], a: float, b: float, abs_tol: float = DEFAULT_ABS_TOL,
                      singular_endpoint: str | None = None,
                      endpoint_approx: Callable[[float], float] | None = None,
                      endpoint_width: float = 1e-8, limit: int = 200) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``abs_tol``.

    ``singular_endpoint`` ("a" or "b") marks an end where ``f`` may blow up
    like ``|log(b - t)| / (b - t)`` times an integrable envelope.  The interval
    is then cut into geometrically shrinking pieces towards that end, and on the
    last piece of width ``endpoint_width`` the caller's ``endpoint_approx``
    (typically the small-argument Bessel form) replaces ``f``.

    Raises :class:`ConvergenceError` carrying the best estimate when the
    subdivision budget is exhausted.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or b < a:
        raise DomainError("need finite a <= b")
    if b == a:
        return 0.0
    if singular_endpoint is None:
        return _quad(f, a, b, abs_tol, limit)[0]
    if singular_endpoint not in ("a", "b"):
        raise DomainError("singular_endpoint must be 'a', 'b' or None")

    length = b - a
    width = min(endpoint_width, 0.5 * length)
    # distances from the singular end: length, length/2, ..., width
    cuts = [length]
    while cuts[-1] / 2.0 > width:
        cuts.append(cuts[-1] / 2.0)
    cuts.append(width)

    def point(d):
        return b - d if singular_endpoint == "b" else a + d

    pieces = []
    err_budget = abs_tol / (len(cuts) + 1)
    total_err = 0.0
    for far, near in zip(cuts[:-1], cuts[1:]):
        lo, hi = sorted((point(far), point(near)))
        try:
            val, err = _quad(f, lo, hi, err_budget, limit)
        except ConvergenceError as exc:
            raise ConvergenceError(str(exc), math.fsum(pieces) + exc.best_estimate, exc.error_estimate) from None
        pieces.append(val)
        total_err += err
    g = endpoint_approx if endpoint_approx is not None else f
    lo, hi = sorted((point(width), point(0.0)))
    try:
        val, err = _quad(g, lo, hi, err_budget, limit)
    except ConvergenceError as exc:
        raise ConvergenceError(str(exc), math.fsum(pieces) + exc.best_estimate, exc.error_estimate) from None
    pieces.append(val)
    total_err += err
    result = math.fsum(pieces)
    if total_err > abs_tol:
        raise ConvergenceError("error estimate exceeds tolerance", result, total_err)
    return result
