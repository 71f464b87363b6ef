"""Curvature data and the weak-field metric of a local free-falling frame.

Everything is expressed in geometric units (c = G = 1): times and lengths
share one unit and curvature components carry 1/length^2.  The electric
components R_{0i0j} form a symmetric d x d matrix which is the sole dynamical
input of the propagator; the full four-index tensor is kept only so the
quadratic metric expansion around the frame origin can be evaluated as a
diagnostic.

The frame metric expansion implemented by :func:`metric_at` is

    g_00  = -(1 + R_{0i0j} x^i x^j)
    g_0i  = -(2/3) R_{0jik} x^j x^k
    g_ij  = delta_ij - (1/3) R_{ikjl} x^k x^l

with the cross components chosen so the line-element term 2 g_0i dt dx^i has
the conventional -(4/3) coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricInput,
    OutsideValidity,
    SymmetryViolation,
    TraceNotZero,
)

SYMMETRY_TOL = 1e-14
VACUUM_TRACE_TOL = 1e-12
RIEMANN_TOL = 1e-12
DEFAULT_VALIDITY_THRESHOLD = 0.1


def _check_vacuum_trace(entries: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(entries))))
    trace = float(np.trace(entries))
    if abs(trace) > VACUUM_TRACE_TOL * scale:
        raise TraceNotZero(f"vacuum tidal matrix has trace {trace:.3e}")


@dataclass(frozen=True, eq=False)
class TidalMatrix:
    """Symmetric electric curvature block R_{0i0j}, units 1/length^2."""

    entries: np.ndarray
    vacuum: bool = False

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise AsymmetricInput(f"tidal matrix must be square, got shape {a.shape}")
        if a.shape[0] not in (1, 2, 3):
            raise AsymmetricInput(f"tidal matrix dimension must be 1, 2 or 3, got {a.shape[0]}")
        if not np.all(np.isfinite(a)):
            raise AsymmetricInput("tidal matrix entries must be finite")
        scale = max(1.0, float(np.max(np.abs(a))))
        skew = float(np.max(np.abs(a - a.T)))
        if skew > SYMMETRY_TOL * scale:
            raise AsymmetricInput(f"tidal matrix asymmetry {skew:.3e} exceeds tolerance")
        sym = (a + a.T) / 2.0
        sym.flags.writeable = False
        object.__setattr__(self, "entries", sym)
        if self.vacuum:
            _check_vacuum_trace(sym)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries)))

    def apply(self, x) -> np.ndarray:
        """R . x"""
        return self.entries @ np.asarray(x, dtype=float)

    def quadratic_form(self, x) -> float:
        """x . R . x"""
        x = np.asarray(x, dtype=float)
        return float(x @ self.entries @ x)

    @classmethod
    def zero(cls, dim: int) -> "TidalMatrix":
        return cls(np.zeros((dim, dim)))

    @classmethod
    def from_riemann(cls, riemann: "RiemannComponents", dim: int = 3,
                     vacuum: bool = False) -> "TidalMatrix":
        """Extract the electric block R_{0i0j} for the first ``dim`` axes."""
        block = riemann.entries[0, 1:dim + 1, 0, 1:dim + 1]
        return cls(np.array(block), vacuum=vacuum)


def _riemann_violation(entries: np.ndarray) -> str | None:
    r = entries
    checks = (
        ("antisymmetry in first pair", r + np.transpose(r, (1, 0, 2, 3))),
        ("antisymmetry in second pair", r + np.transpose(r, (0, 1, 3, 2))),
        ("pair-exchange symmetry", r - np.transpose(r, (2, 3, 0, 1))),
        ("first Bianchi identity",
         r + np.transpose(r, (0, 2, 3, 1)) + np.transpose(r, (0, 3, 1, 2))),
    )
    for name, defect in checks:
        worst = float(np.max(np.abs(defect)))
        if worst > RIEMANN_TOL:
            return f"{name} violated by {worst:.3e}"
    return None


@dataclass(frozen=True, eq=False)
class RiemannComponents:
    """Full R_{mu nu lambda rho}, indices 0..3, units 1/length^2."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.shape != (4, 4, 4, 4):
            raise SymmetryViolation(f"expected shape (4,4,4,4), got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise SymmetryViolation("curvature entries must be finite")
        problem = _riemann_violation(a)
        if problem is not None:
            raise SymmetryViolation(problem)
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @classmethod
    def zero(cls) -> "RiemannComponents":
        return cls(np.zeros((4, 4, 4, 4)))


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of the weak-field scale check epsilon = max|R| L^2."""

    epsilon: float
    ok: bool
    messages: tuple[str, ...] = ()
    threshold: float = DEFAULT_VALIDITY_THRESHOLD


def validate_tidal(tidal, domain_extent: float, vacuum: bool | None = None,
                   threshold: float = DEFAULT_VALIDITY_THRESHOLD) -> ValidityReport:
    """Check the weak-field regime for a domain of the given linear extent.

    ``epsilon = max|R_ij| * domain_extent**2`` estimates the squared ratio of
    domain size to curvature radius; the quadratic metric expansion needs it
    small.  Raises AsymmetricInput / TraceNotZero for malformed input and
    returns a report whose ``ok`` reflects ``epsilon < threshold``.
    """
    if domain_extent <= 0:
        raise ValueError("domain_extent must be positive")
    if not isinstance(tidal, TidalMatrix):
        tidal = TidalMatrix(np.asarray(tidal, dtype=float), vacuum=bool(vacuum))
    elif vacuum or (vacuum is None and tidal.vacuum):
        _check_vacuum_trace(tidal.entries)
    epsilon = tidal.max_abs() * float(domain_extent) ** 2
    ok = epsilon < threshold
    messages: tuple[str, ...] = ()
    if not ok:
        messages = (f"epsilon={epsilon:.3e} exceeds weak-field threshold {threshold:g}",)
    return ValidityReport(epsilon=epsilon, ok=ok, messages=messages, threshold=threshold)


def proper_time_rate(x, tidal: TidalMatrix) -> float:
    """Exact clock rate sqrt(1 + x.R.x) at a point of the frame."""
    u = tidal.quadratic_form(x)
    if 1.0 + u <= 0.0:
        raise OutsideValidity(f"1 + x.R.x = {1.0 + u:.3e} is not positive")
    return float(np.sqrt(1.0 + u))


def first_order_rate(x, tidal: TidalMatrix) -> float:
    """Truncated clock rate 1 + x.R.x / 2 (what the propagator imprints)."""
    return 1.0 + 0.5 * tidal.quadratic_form(x)


def metric_at(x, riemann: RiemannComponents) -> np.ndarray:
    """Quadratic metric expansion at spatial point ``x`` (up to 3 components).

    Diagnostic only: the propagator uses just the g_00 content through the
    clock-rate formulas above.
    """
    x3 = np.zeros(3)
    xv = np.asarray(x, dtype=float).reshape(-1)
    if xv.size > 3:
        raise ValueError("position must have at most 3 components")
    x3[:xv.size] = xv
    r = riemann.entries
    g = np.diag([-1.0, 1.0, 1.0, 1.0])
    g[0, 0] = -(1.0 + np.einsum("ij,i,j->", r[0, 1:, 0, 1:], x3, x3))
    g0i = -(2.0 / 3.0) * np.einsum("jik,j,k->i", r[0, 1:, 1:, 1:], x3, x3)
    g[0, 1:] = g0i
    g[1:, 0] = g0i
    g[1:, 1:] += -(1.0 / 3.0) * np.einsum("ikjl,k,l->ij", r[1:, 1:, 1:, 1:], x3, x3)
    return (g + g.T) / 2.0
