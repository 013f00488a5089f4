"""Discrete 1-forms on a toroidal complex or its dual.

A 1-form is stored as one value per edge in the stored edge orientation;
the value on the reversed edge is the negative.  Forms on a
:class:`~torusharmonic.topology.DualComplex` are "dual side" forms and live
on the dual edges ``*e`` (same index as ``e``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NotClosedError, SideMismatchError
from .topology import EdgeWeights, ToroidalComplex

RESIDUAL_RTOL = 1e-10


def residual_tol(values, rtol: float = RESIDUAL_RTOL) -> float:
    values = np.asarray(values)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    return rtol * max(scale, 1.0)


class PeriodPair(NamedTuple):
    A: float
    B: float


def bracket(p, q) -> float:
    """Skew pairing ``A*B' - B*A'`` of two period pairs."""
    return float(p[0] * q[1] - p[1] * q[0])


@dataclass(frozen=True)
class ResidualCheck:
    ok: bool
    residuals: np.ndarray
    tol: float

    def __bool__(self) -> bool:
        return self.ok

    @property
    def worst(self) -> float:
        return float(np.max(np.abs(self.residuals))) if self.residuals.size else 0.0

    def offenders(self) -> np.ndarray:
        return np.flatnonzero(np.abs(self.residuals) > self.tol)


@dataclass(frozen=True, eq=False)
class OneForm:
    complex: ToroidalComplex
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size != self.complex.num_edges:
            raise ValueError(f"expected {self.complex.num_edges} edge values, got {v.size}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def side(self) -> str:
        return "dual" if self.complex.is_dual() else "primal"

    def _check_same(self, other: "OneForm"):
        if other.complex is not self.complex:
            raise SideMismatchError("forms live on different complexes")

    def __add__(self, other: "OneForm") -> "OneForm":
        self._check_same(other)
        return OneForm(self.complex, self.values + other.values)

    def __sub__(self, other: "OneForm") -> "OneForm":
        self._check_same(other)
        return OneForm(self.complex, self.values - other.values)

    def __mul__(self, scalar: float) -> "OneForm":
        return OneForm(self.complex, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "OneForm":
        return OneForm(self.complex, -self.values)

    def on_reversed(self, k: int) -> float:
        return -float(self.values[k])


def exterior_derivative(cx: ToroidalComplex, f) -> OneForm:
    """``df(e) = f(head) - f(tail)``."""
    f = np.asarray(f, dtype=float)
    if f.shape != (cx.num_vertices,):
        raise ValueError(f"vertex function must have shape ({cx.num_vertices},)")
    return OneForm(cx, f[cx.heads] - f[cx.tails])


def label_form(cx: ToroidalComplex, k: int) -> OneForm:
    """The closed form given by component ``k`` (0 or 1) of the edge labels."""
    return OneForm(cx, cx.labels[:, k].astype(float))


def face_sums(cx: ToroidalComplex, values) -> np.ndarray:
    values = np.asarray(values)
    return np.array([np.dot(sg, values[idx]) for idx, sg in cx.face_edges])


def vertex_sums(cx: ToroidalComplex, values) -> np.ndarray:
    """``sum_j values_ij`` over edges leaving each vertex (``d^T`` up to sign)."""
    values = np.asarray(values)
    out = np.zeros((cx.num_vertices,) + values.shape[1:], dtype=values.dtype)
    np.add.at(out, cx.tails, values)
    np.add.at(out, cx.heads, -values)
    return out


def is_closed(omega: OneForm) -> ResidualCheck:
    res = face_sums(omega.complex, omega.values)
    tol = residual_tol(omega.values)
    return ResidualCheck(bool(np.all(np.abs(res) <= tol)), res, tol)


def is_coclosed(omega: OneForm, weights: EdgeWeights | None = None) -> ResidualCheck:
    """Vertex condition ``sum_j c_ij omega_ij = 0``; ``weights=None`` means ``c = 1``."""
    if omega.side != "primal":
        raise SideMismatchError("co-closedness is tested on primal forms")
    cw = omega.values if weights is None else weights.values * omega.values
    res = vertex_sums(omega.complex, cw)
    tol = residual_tol(cw)
    return ResidualCheck(bool(np.all(np.abs(res) <= tol)), res, tol)


def _fit_periods(cx: ToroidalComplex, values: np.ndarray):
    """Least-squares periods from spanning-tree defects; returns ``(coef, residual, tol)``."""
    values = np.asarray(values)
    delta = cx.tree_defects(values)
    lam = cx.label_defects.astype(float)
    _, _, tree = cx.spanning_tree
    off = ~tree
    # normal equations with an exact integer Gram matrix, solved by Cramer's rule
    lo = lam[off]
    G = lo.T @ lo
    r = lo.T @ delta[off]
    det = G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0]
    coef = np.array([G[1, 1] * r[0] - G[0, 1] * r[1], G[0, 0] * r[1] - G[1, 0] * r[0]]) / det
    resid = delta - lam @ coef
    return coef, resid, residual_tol(values)


def periods(omega: OneForm) -> PeriodPair:
    """Sums of a closed form along the two marking generators."""
    coef, resid, tol = _fit_periods(omega.complex, omega.values)
    if np.max(np.abs(resid), initial=0.0) > tol:
        raise NotClosedError(
            f"form is not closed: tree-defect residual {np.max(np.abs(resid)):.3e} > {tol:.3e}"
        )
    return PeriodPair(float(coef[0]), float(coef[1]))


def integrate(cx: ToroidalComplex, values):
    """Write a closed form as ``g(head) - g(tail) + A*dx + B*dy``.

    ``values`` may be complex.  Returns ``(g, (A, B))`` with ``g`` zero at
    vertex 0.  Raises :class:`NotClosedError` when no such decomposition
    exists.
    """
    values = np.asarray(values)
    coef, resid, tol = _fit_periods(cx, values)
    if np.max(np.abs(resid), initial=0.0) > tol:
        raise NotClosedError(
            f"inconsistent integration: residual {np.max(np.abs(resid)):.3e} > {tol:.3e}"
        )
    pot = cx.tree_potential(values) - cx.tree_potential(cx.labels.astype(float)) @ coef
    return pot, (coef[0], coef[1])


def is_exact(omega: OneForm) -> bool:
    """Closed with vanishing periods, certified by reconstructing a potential."""
    if not is_closed(omega):
        return False
    g, (a, b) = integrate(omega.complex, omega.values)
    tol = residual_tol(omega.values)
    if abs(a) > tol or abs(b) > tol:
        return False
    return bool(np.all(np.abs(g[omega.complex.heads] - g[omega.complex.tails] - omega.values) <= tol))


def hodge_star(omega: OneForm, weights: EdgeWeights) -> OneForm:
    """Discrete Hodge star.

    A primal form maps to ``c * omega`` on the dual edges.  A dual form maps
    back to the primal with weights ``1/c``; because ``**e`` is ``e``
    reversed, ``hodge_star(hodge_star(w)) == -w``.
    """
    if weights.has_zero:
        raise ValueError("Hodge star needs non-zero weights on every edge (dual weight 1/c)")
    if omega.side == "primal":
        return OneForm(omega.complex.dual, weights.values * omega.values)
    primal = omega.complex.primal
    if primal is None:
        raise SideMismatchError("dual form without a primal complex")
    return OneForm(primal, -omega.values / weights.values)


def pairing(omega: OneForm, eta: OneForm) -> float:
    """``sum_e omega_e * eta_e`` for primal ``omega`` and dual-side ``eta``."""
    if omega.side != "primal" or eta.side != "dual":
        raise SideMismatchError("pairing needs a primal form and a dual-side form")
    if eta.complex.primal is not omega.complex:
        raise SideMismatchError("dual form does not belong to this complex")
    return float(np.dot(omega.values, eta.values))


def as_dual(omega: OneForm) -> OneForm:
    """Reinterpret a primal form's edge values on the dual edges (no weights)."""
    if omega.side != "primal":
        raise SideMismatchError("expected a primal form")
    return OneForm(omega.complex.dual, omega.values)
