"""Deformed derivatives, closed-form and numeric.

Two one-parameter generalizations of d/dx, both collapsing to the ordinary
derivative as q -> 1 (delta = 1-q -> 0):

* primal: ``(1 + delta*x) * f'(x)`` — deformation acts on the *argument*
  axis. The deformed exponential is its fixed point.
* dual: ``F'(x) / (1 + delta*F(x))`` — deformation acts on the *value*
  axis. It sends the deformed logarithm to ``1/x``.

The numeric variants never touch ``f.derivative``. The primal one
differences in the transformed coordinate ``u = ln_big_e(x)``, where the
primal derivative is an ordinary d/du; the chart maps the pole to u = -inf,
so no finite stencil can straddle it. The dual one differences
``ln_big_e(F(x))`` in x. Both refine a central difference with Richardson
extrapolation and carry a step-halving error estimate; if that estimate
misses ``rel_tol`` a :class:`~qcalc.errors.ToleranceWarning` is emitted.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import (
    DomainError,
    MissingDerivativeError,
    PoleError,
    ToleranceWarning,
)
from .funcexpr import RealFunction
from .qcore import Deformation, ln_big_e

__all__ = [
    "DerivConfig",
    "primal_qderiv_closed",
    "primal_qderiv_numeric",
    "primal_qderiv_numeric_with_estimate",
    "dual_qderiv_closed",
    "dual_qderiv_numeric",
    "dual_qderiv_numeric_with_estimate",
]

_CBRT_EPS = math.ulp(1.0) ** (1.0 / 3.0)  # ~6.06e-6, optimal central-diff step
_MAX_SHRINKS = 8


@dataclass(frozen=True)
class DerivConfig:
    """Stencil and acceptance parameters for the numeric derivatives.

    base_step is the smallest central-difference step (scaled by the
    magnitude of the differencing coordinate); richardson_levels halvings
    are laid above it. rel_tol is the error-estimate acceptance threshold
    relative to max(1, |result|).
    """

    base_step: float = _CBRT_EPS
    richardson_levels: int = 3
    rel_tol: float = 1e-8

    def __post_init__(self):
        if self.base_step <= 0.0 or not math.isfinite(self.base_step):
            raise ValueError(f"base_step must be positive, got {self.base_step}")
        if self.richardson_levels < 1:
            raise ValueError("richardson_levels must be at least 1")
        if self.rel_tol <= 0.0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")


def primal_qderiv_closed(f: RealFunction, x: float, d: Deformation) -> float:
    """(1 + delta*x) * f'(x) from the attached derivative.

    Raises:
        MissingDerivativeError: if f carries no derivative.
    """
    if f.derivative is None:
        raise MissingDerivativeError(
            f"closed-form deformed derivative needs f.derivative ({f.label or 'unlabeled'})"
        )
    return d.bracket(x) * f.derivative(x)


def dual_qderiv_closed(F: RealFunction, x: float, d: Deformation) -> float:
    """F'(x) / (1 + delta*F(x)) from the attached derivative.

    Raises:
        MissingDerivativeError: if F carries no derivative.
        PoleError: if 1 + delta*F(x) is zero.
    """
    if F.derivative is None:
        raise MissingDerivativeError(
            f"closed-form deformed derivative needs F.derivative ({F.label or 'unlabeled'})"
        )
    den = d.bracket(F(x))
    if den == 0.0:
        raise PoleError(f"1 + delta*F(x) vanishes at x = {x}")
    return F.derivative(x) / den


def _richardson(phi, h0: float, levels: int) -> tuple[float, float]:
    """Extrapolate central differences phi(h0/2^j) to the h -> 0 limit.

    Returns (value, error_estimate); the estimate is the difference of the
    last two diagonal entries of the extrapolation table.
    """
    prev_row: list[float] = []
    diag: list[float] = []
    for j in range(levels + 1):
        row = [phi(h0 / (2.0**j))]
        for k in range(1, j + 1):
            row.append(row[k - 1] + (row[k - 1] - prev_row[k - 1]) / (4.0**k - 1.0))
        prev_row = row
        diag.append(row[-1])
    return diag[-1], abs(diag[-1] - diag[-2])


def _refine(phi, h0: float, config: DerivConfig, where: str) -> tuple[float, float]:
    """Run Richardson, shrinking the whole stencil when it exits the domain."""
    last_error: Exception | None = None
    for attempt in range(_MAX_SHRINKS + 1):
        try:
            value, err = _richardson(phi, h0 / (2.0**attempt), config.richardson_levels)
        except (DomainError, PoleError, ValueError, OverflowError, ZeroDivisionError) as e:
            last_error = e
            continue
        if err > config.rel_tol * max(1.0, abs(value)):
            warnings.warn(
                ToleranceWarning(
                    f"{where}: error estimate {err:.3e} exceeds "
                    f"rel_tol={config.rel_tol:.1e} (value {value:.6e})"
                ),
                stacklevel=4,
            )
        return value, err
    raise DomainError(
        f"{where}: no difference stencil fits inside the domain "
        f"after {_MAX_SHRINKS} shrinks"
    ) from last_error


def primal_qderiv_numeric(
    f: RealFunction, x: float, d: Deformation, config: DerivConfig = DerivConfig()
) -> float:
    """Derivative-free (1 + delta*x) * f'(x).

    Differences f in u = ln_big_e(x), where this operator is the plain
    d/du. The inverse chart keeps every stencil point on x's side of the
    pole. Stencils that leave f's domain shrink by up to 2^8 before giving
    up with DomainError.
    """
    return primal_qderiv_numeric_with_estimate(f, x, d, config)[0]


def primal_qderiv_numeric_with_estimate(
    f: RealFunction, x: float, d: Deformation, config: DerivConfig = DerivConfig()
) -> tuple[float, float]:
    """primal_qderiv_numeric plus its extrapolation-table error estimate."""
    if not f.domain(x):
        raise DomainError(f"x = {x} is outside the domain of {f.label or 'f'}")
    if d.classical:
        u0, x_of = x, lambda u: u
    else:
        s = d.bracket(x)
        if s == 0.0:
            raise PoleError(f"x = {x} sits on the pole of the coordinate chart")
        u0 = ln_big_e(x, d)
        if s > 0.0:
            x_of = lambda u: math.expm1(d.delta * u) / d.delta
        else:
            x_of = lambda u: (-math.exp(d.delta * u) - 1.0) / d.delta

    def phi(h: float) -> float:
        xp, xm = x_of(u0 + h), x_of(u0 - h)
        if not (f.domain(xp) and f.domain(xm)):
            raise DomainError("stencil point outside domain")
        return (f(xp) - f(xm)) / (2.0 * h)

    h0 = config.base_step * (2.0**config.richardson_levels) * max(1.0, abs(u0))
    return _refine(phi, h0, config, "primal derivative")


def dual_qderiv_numeric(
    F: RealFunction, x: float, d: Deformation, config: DerivConfig = DerivConfig()
) -> float:
    """Derivative-free F'(x) / (1 + delta*F(x)).

    Differences ln_big_e(F(x)) in x; the chain rule makes that exactly the
    dual derivative wherever 1 + delta*F > 0.

    Raises:
        DomainError: if F(x) lies in the cutoff region (1 + delta*F <= 0),
            or no shrunken stencil stays inside F's domain.
    """
    return dual_qderiv_numeric_with_estimate(F, x, d, config)[0]


def dual_qderiv_numeric_with_estimate(
    F: RealFunction, x: float, d: Deformation, config: DerivConfig = DerivConfig()
) -> tuple[float, float]:
    """dual_qderiv_numeric plus its extrapolation-table error estimate."""
    if not F.domain(x):
        raise DomainError(f"x = {x} is outside the domain of {F.label or 'F'}")
    if d.bracket(F(x)) <= 0.0:
        raise DomainError(
            f"F(x) = {F(x)} lies in the cutoff region at x = {x}; "
            "the dual derivative is undefined there"
        )

    def phi(h: float) -> float:
        xp, xm = x + h, x - h
        if not (F.domain(xp) and F.domain(xm)):
            raise DomainError("stencil point outside domain")
        yp, ym = F(xp), F(xm)
        if d.bracket(yp) <= 0.0 or d.bracket(ym) <= 0.0:
            raise DomainError("stencil value in the cutoff region")
        return (ln_big_e(yp, d) - ln_big_e(ym, d)) / (2.0 * h)

    h0 = config.base_step * (2.0**config.richardson_levels) * max(1.0, abs(x))
    return _refine(phi, h0, config, "dual derivative")
