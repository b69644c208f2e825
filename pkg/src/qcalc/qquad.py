"""Deformed integrals: adaptive quadrature plus independent cross-checks.

The primal integral is an ordinary integral against the weight
``1/(1 + delta*x)``; the dual integral applies ``ln_q . exp`` once to the
ordinary integral of the integrand. Both ride on one adaptive
Gauss-Kronrod engine with deterministic worst-interval-first refinement.

Cross-check paths that deliberately share no code with that engine:

* :func:`primal_qint_riemann` — a flat midpoint sum;
* :func:`partition_sum_oracle` — the closed geometric-series value of the
  step sum of the deformed exponential over a :class:`GeometricPartition`
  (the partition whose nodes are equally spaced in ``u = ln_big_e(x)``).

:func:`borges_dual_qint` computes the operationally tempting but wrong
value-side integral ``int (1 + delta*f) f dx``; it exists so its failure
to invert the dual derivative can be demonstrated, not for use.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import DomainError, SingularityError
from .funcexpr import RealFunction
from .qcore import Deformation, ln_big_e, q_add, q_exp, q_log_exp_of, q_times_n

__all__ = [
    "SingularityMode",
    "QuadratureConfig",
    "IntegralFlag",
    "IntegralResult",
    "primal_qint",
    "primal_qint_riemann",
    "dual_qint",
    "dual_qint_from",
    "borges_dual_qint",
    "GeometricPartition",
    "partition_sum_oracle",
]


class SingularityMode(Enum):
    """What to do when the integration interval crosses the weight's pole."""

    ERROR = "error"
    REFLECT = "reflect"


class IntegralFlag(Enum):
    SINGULARITY_CROSSED = "SingularityCrossed"
    REFLECTION_APPLIED = "ReflectionApplied"
    TOLERANCE_NOT_MET = "ToleranceNotMet"


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000
    singularity_mode: SingularityMode = SingularityMode.ERROR

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


@dataclass(frozen=True)
class IntegralResult:
    """Value, a conservative error estimate, and what happened on the way.

    Unless TOLERANCE_NOT_MET is flagged, error_estimate is at most
    max(abs_tol, rel_tol * |value|) of the config that produced it.
    """

    value: float
    error_estimate: float
    flags: frozenset = field(default_factory=frozenset)

    def __float__(self) -> float:
        return self.value


# ---------------------------------------------------------------------------
# Gauss-Kronrod 7/15 adaptive engine

# Kronrod abscissae (positive half); every other one is a Gauss-7 node.
_XK = (
    0.99145537112081263921,
    0.94910791234275852453,
    0.86486442335976907279,
    0.74153118559939443986,
    0.58608723546769113029,
    0.40584515137739716691,
    0.20778495500789846760,
)
_WK = (
    0.02293532201052922496,
    0.06309209262997855329,
    0.10479001032225018384,
    0.14065325971552591875,
    0.16900472663926790283,
    0.19035057806478540991,
    0.20443294007529889241,
)
_WK_CENTER = 0.20948214108472782801
_WG = (
    0.12948496616886969327,
    0.27970539148927666790,
    0.38183005050511894495,
)
_WG_CENTER = 0.41795918367346938776


def _kronrod_panel(g, a: float, b: float) -> tuple[float, float]:
    """15-point Kronrod value and its error heuristic on [a, b]."""
    c = 0.5 * (a + b)
    hl = 0.5 * (b - a)
    fc = g(c)
    sk = _WK_CENTER * fc
    sg = _WG_CENTER * fc
    for i, x in enumerate(_XK):
        pair = g(c + hl * x) + g(c - hl * x)
        sk += _WK[i] * pair
        if i % 2 == 1:  # Gauss subset
            sg += _WG[i // 2] * pair
    value = sk * hl
    d = abs(value - sg * hl)
    return value, min(d, (200.0 * d) ** 1.5)


def _adaptive(g, a: float, b: float, config: QuadratureConfig) -> tuple[float, float, bool]:
    """Worst-first adaptive refinement; deterministic for a given input."""
    value, err = _kronrod_panel(g, a, b)
    # heap entries: (-err, insertion order, a, b, value, err)
    heap = [(-err, 0, a, b, value, err)]
    order = 1
    for _ in range(config.max_subdivisions):
        total = math.fsum(e[4] for e in heap)
        total_err = math.fsum(e[5] for e in heap)
        if total_err <= max(config.abs_tol, config.rel_tol * abs(total)):
            return total, total_err, True
        _, _, wa, wb, _, _ = heapq.heappop(heap)
        mid = 0.5 * (wa + wb)
        for lo, hi in ((wa, mid), (mid, wb)):
            v, e = _kronrod_panel(g, lo, hi)
            heapq.heappush(heap, (-e, order, lo, hi, v, e))
            order += 1
    total = math.fsum(e[4] for e in heap)
    total_err = math.fsum(e[5] for e in heap)
    converged = total_err <= max(config.abs_tol, config.rel_tol * abs(total))
    return total, total_err, converged


def _adaptive_directed(g, a: float, b: float, config: QuadratureConfig):
    if a == b:
        return 0.0, 0.0, True
    if a < b:
        return _adaptive(g, a, b, config)
    value, err, ok = _adaptive(g, b, a, config)
    return -value, err, ok


# ---------------------------------------------------------------------------
# Primal integral

def primal_qint(
    f: RealFunction,
    x_lo: float,
    x_hi: float,
    d: Deformation,
    config: QuadratureConfig = QuadratureConfig(),
) -> IntegralResult:
    """Integral of f against the measure dx / (1 + delta*x).

    Inverts the primal derivative on its support. Swapped bounds negate the
    value exactly. If the weight's pole -1/delta lies strictly inside the
    interval, behaviour follows config.singularity_mode: ERROR raises
    SingularityError; REFLECT instead integrates over the equal-value
    mirror interval [x_lo, -2/delta - x_hi], which never re-crosses the
    pole, and flags what it did. A pole exactly on a bound always raises.
    """
    if x_lo > x_hi:
        inner = primal_qint(f, x_hi, x_lo, d, config)
        return IntegralResult(-inner.value, inner.error_estimate, inner.flags)
    if x_lo == x_hi:
        return IntegralResult(0.0, 0.0)

    flags = set()
    hi = x_hi
    if not d.classical:
        if d.bracket(x_lo) == 0.0 or d.bracket(x_hi) == 0.0:
            raise SingularityError(
                f"integration bound sits on the pole at {d.pole}"
            )
        if x_lo < d.pole < x_hi:
            if config.singularity_mode is SingularityMode.ERROR:
                raise SingularityError(
                    f"interval [{x_lo}, {x_hi}] crosses the pole at {d.pole}"
                )
            hi = -2.0 / d.delta - x_hi  # mirror image of x_hi across the pole
            flags.add(IntegralFlag.SINGULARITY_CROSSED)
            flags.add(IntegralFlag.REFLECTION_APPLIED)

    if d.classical:
        g = f.eval
    else:
        def g(x: float, _f=f.eval) -> float:
            return _f(x) / d.bracket(x)

    value, err, converged = _adaptive_directed(g, x_lo, hi, config)
    if not converged:
        flags.add(IntegralFlag.TOLERANCE_NOT_MET)
    return IntegralResult(value, err, frozenset(flags))


def primal_qint_riemann(
    f: RealFunction, x_lo: float, x_hi: float, n: int, d: Deformation
) -> float:
    """Flat n-step midpoint sum for the primal integral. Cross-check only.

    Shares no code with the adaptive engine; O(h^2), so large n is the
    point. No pole handling: the caller keeps the pole outside.
    """
    if n < 1:
        raise DomainError(f"need at least one step, got n = {n}")
    h = (x_hi - x_lo) / n
    midpoints = (x_lo + (i + 0.5) * h for i in range(n))
    if d.classical:
        return h * math.fsum(f(x) for x in midpoints)
    return h * math.fsum(f(x) / d.bracket(x) for x in midpoints)


# ---------------------------------------------------------------------------
# Geometric partition of the primal axis

@dataclass(frozen=True)
class GeometricPartition:
    """n+1 nodes from x_lo to x_hi, equally spaced in u = ln_big_e(x).

    Node i is x_lo (+)_q (i (.)_q t) with common deformed step
    t = (z^(1/n) - 1)/delta, z = (1 + delta*x_hi)/(1 + delta*x_lo); the
    brackets 1 + delta*x form a geometric progression along the nodes.
    Requires a non-classical deformation and both bounds on the support.
    """

    x_lo: float
    x_hi: float
    n: int
    deformation: Deformation
    z: float = field(init=False)
    t: float = field(init=False)
    nodes: tuple = field(init=False)

    def __post_init__(self):
        d = self.deformation
        if d.classical:
            raise DomainError("geometric partition needs q != 1")
        if self.n < 1:
            raise DomainError(f"need at least one step, got n = {self.n}")
        if not self.x_lo < self.x_hi:
            raise DomainError("need x_lo < x_hi")
        s_lo, s_hi = d.bracket(self.x_lo), d.bracket(self.x_hi)
        if s_lo <= 0.0 or s_hi <= 0.0:
            raise DomainError("both bounds must lie on the support (bracket > 0)")
        z = s_hi / s_lo
        t = math.expm1(math.log(z) / self.n) / d.delta
        nodes = [self.x_lo]
        for i in range(1, self.n):
            nodes.append(q_add(self.x_lo, q_times_n(i, t, d), d))
        nodes.append(self.x_hi)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "nodes", tuple(nodes))


def partition_sum_oracle(
    x_lo: float, x_hi: float, n: int, d: Deformation
) -> float:
    """Step sum of the deformed exponential over the geometric partition.

    Each cell contributes e_q(node_i) * (u_i - u_(i-1)); the brackets are
    geometric, so the whole sum collapses to a closed geometric series —
    no quadrature code involved. Decreases monotonically to
    e_q(x_hi) - e_q(x_lo) at rate O(1/n).
    """
    part = GeometricPartition(x_lo, x_hi, n, d)  # validates the inputs
    z, delta = part.z, d.delta
    du = math.log(z) / (n * delta)
    e_lo = q_exp(x_lo, d).value
    r = z ** (1.0 / (n * delta))  # bracket ratio per cell, in value space
    if r == 1.0:
        return e_lo * du * n
    # sum_{i=1..n} e_lo * r^i * du
    return e_lo * du * r * (r**n - 1.0) / (r - 1.0)


# ---------------------------------------------------------------------------
# Dual integral

def dual_qint(
    f: RealFunction,
    x_lo: float,
    x_hi: float,
    d: Deformation,
    config: QuadratureConfig = QuadratureConfig(),
) -> IntegralResult:
    """ln_q(exp(integral of f)): the inverse of the dual derivative.

    The deformation acts once, on the whole ordinary integral — never
    inside the quadrature. The error estimate is transported through the
    outer map by its derivative exp(delta * A).
    """
    a_val, a_err, converged = _adaptive_directed(f.eval, x_lo, x_hi, config)
    value = q_log_exp_of(a_val, d)
    try:
        scale = math.exp(d.delta * a_val)
    except OverflowError:
        scale = math.inf
    flags = frozenset() if converged else frozenset({IntegralFlag.TOLERANCE_NOT_MET})
    return IntegralResult(value, a_err * scale, flags)


def dual_qint_from(
    f: RealFunction,
    x_lo: float,
    x_hi: float,
    start: float,
    d: Deformation,
    config: QuadratureConfig = QuadratureConfig(),
) -> IntegralResult:
    """Dual integral shifted to start at the value ``start`` at x_lo.

    Deformed-adds the start value, so integrating a dual derivative
    reconstructs the original function rather than its (+)_q-class.
    """
    inner = dual_qint(f, x_lo, x_hi, d, config)
    value = q_add(inner.value, start, d)
    return IntegralResult(
        value, inner.error_estimate * abs(d.bracket(start)), inner.flags
    )


def borges_dual_qint(
    f: RealFunction,
    x_lo: float,
    x_hi: float,
    d: Deformation,
    config: QuadratureConfig = QuadratureConfig(),
) -> float:
    """The flawed value-side integral: int (1 + delta*f(x)) f(x) dx.

    Pushing the deformation into the integrand looks like the natural
    inverse of the dual derivative but is not one: already for f = 1/x it
    produces ln x - delta/x + c. Kept as the negative control.
    """
    def g(x: float) -> float:
        y = f(x)
        return (1.0 + d.delta * y) * y

    value, _, _ = _adaptive_directed(g, x_lo, x_hi, config)
    return value
