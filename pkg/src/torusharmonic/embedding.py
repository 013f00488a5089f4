"""Harmonic straight-line maps into flat tori and their reciprocal (conjugate) maps."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .forms import integrate, vertex_sums, face_sums
from .moduli import Modulus, proportionality_defect
from .solver import OperatorBundle
from .topology import EdgeWeights, ToroidalComplex, vertex_rotations

RESIDUAL_RTOL = 1e-9
RATIO_RTOL = 1e-8
REAL_RTOL = 1e-9
PERIOD_TOL = 1e-8
CONVEX_RTOL = 1e-10


def _as_modulus(tau) -> Modulus:
    return tau if isinstance(tau, Modulus) else Modulus(complex(tau))


@dataclass(frozen=True, eq=False)
class TorusEmbedding:
    """Lift of a straight-line map into ``S_tau``.

    ``positions[v]`` is the base lift of vertex ``v``; ``displacements[e]``
    is the vector from the tail's base lift to the lift of the head reached
    along ``e`` (deck translation included).
    """

    complex: ToroidalComplex
    modulus: Modulus
    positions: np.ndarray
    displacements: np.ndarray
    base_vertex: int = 0

    @classmethod
    def from_positions(cls, cx, modulus, positions, base_vertex=0) -> "TorusEmbedding":
        m = _as_modulus(modulus)
        pos = np.array(positions, dtype=complex)
        lat = cx.labels @ m.translations
        disp = pos[cx.heads] - pos[cx.tails] + lat
        return cls(cx, m, pos, disp, base_vertex)

    def moved(self, vertex: int, delta: complex) -> "TorusEmbedding":
        pos = self.positions.copy()
        pos[vertex] += delta
        return TorusEmbedding.from_positions(self.complex, self.modulus, pos, self.base_vertex)

    def translated(self, shift: complex) -> "TorusEmbedding":
        return replace(self, positions=self.positions + shift)

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.displacements), initial=0.0)) or 1.0

    def face_closure_residual(self) -> float:
        return float(np.max(np.abs(face_sums(self.complex, self.displacements)), initial=0.0))

    def harmonicity_residual(self, weights: EdgeWeights) -> float:
        res = vertex_sums(self.complex, weights.values * self.displacements)
        return float(np.max(np.abs(res), initial=0.0))

    def deck_translations(self) -> tuple[complex, complex]:
        """Measured ``h o gamma_k - h`` from the displacement field."""
        _, (p1, p2) = integrate(self.complex, self.displacements)
        return complex(p1), complex(p2)

    def face_polygon(self, f: int) -> np.ndarray:
        """Corners of face ``f`` in its reference lift (first corner at its base lift)."""
        idx, sg = self.complex.face_edges[f]
        steps = self.displacements[idx] * sg
        first = self.complex.tails[idx[0]] if sg[0] > 0 else self.complex.heads[idx[0]]
        return self.positions[first] + np.concatenate([[0], np.cumsum(steps)[:-1]])


def harmonic_embedding(bundle: OperatorBundle, tau) -> TorusEmbedding:
    """Energy-minimizing map into ``S_tau`` in the homotopy class fixed by the labels.

    Real and imaginary parts are the harmonic forms with periods
    ``(1, Re tau)/sqrt(Im tau)`` and ``(0, Im tau)/sqrt(Im tau)``.
    """
    m = _as_modulus(tau)
    P = m.real_periods()
    f = bundle.potentials(P)
    vals = bundle.d @ f + bundle.M @ P
    return TorusEmbedding(
        bundle.complex,
        m,
        f[:, 0] + 1j * f[:, 1],
        vals[:, 0] + 1j * vals[:, 1],
        bundle.root,
    )


def dirichlet_energy(emb: TorusEmbedding, weights: EdgeWeights) -> float:
    return 0.5 * float(np.sum(weights.values * np.abs(emb.displacements) ** 2))


@dataclass(frozen=True, eq=False)
class DualEmbedding:
    """Reciprocal map on the dual complex.

    ``positions[f]`` is the image of the reference lift of face ``f``;
    ``displacements[e]`` is the vector along ``*e`` (right face to left
    face).  ``k`` is the scale used for ``scaled`` (``h / k``), if any.
    """

    complex: ToroidalComplex
    positions: np.ndarray
    displacements: np.ndarray
    deck: tuple[complex, complex]
    k: float | None = None

    @property
    def scaled_positions(self) -> np.ndarray | None:
        return None if self.k is None else self.positions / self.k

    @property
    def scaled_deck(self) -> tuple[complex, complex] | None:
        return None if self.k is None else (self.deck[0] / self.k, self.deck[1] / self.k)

    def translated(self, shift: complex) -> "DualEmbedding":
        return replace(self, positions=self.positions + shift)

    def aligned_to(self, emb: TorusEmbedding) -> "DualEmbedding":
        """Translate so scaled dual vertices sit, on average, at their primal face centroids."""
        k = self.k or 1.0
        cent = np.array([emb.face_polygon(f).mean() for f in range(emb.complex.num_faces)])
        return self.translated(k * np.mean(cent - self.positions / k))


def conjugate_embedding(emb: TorusEmbedding, weights: EdgeWeights, k: float | None = None) -> DualEmbedding:
    """Integrate ``h*_left - h*_right = i c (h_head - h_tail)`` over the dual complex."""
    dual = emb.complex.dual
    zeta = 1j * weights.values * emb.displacements
    pos, (p1, p2) = integrate(dual, zeta)
    return DualEmbedding(dual, pos, zeta, (complex(p1), complex(p2)), k)


# ---------------------------------------------------------------------------
# Delaunay certification
# ---------------------------------------------------------------------------


@dataclass
class PolygonCheck:
    convex_positive: list[int] = field(default_factory=list)
    degenerate: list[int] = field(default_factory=list)
    failed: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed


def _classify_polygon(steps: np.ndarray) -> str:
    """'convex', 'degenerate' (flat corner or digon) or 'fail' for a closed edge cycle."""
    n = len(steps)
    if n < 3:
        return "degenerate"
    prev = np.roll(steps, 1)
    cross = (np.conj(prev) * steps).imag
    tol = CONVEX_RTOL * np.abs(prev) * np.abs(steps)
    tol = np.maximum(tol, CONVEX_RTOL * np.max(np.abs(steps)) ** 2)
    if np.any(cross < -tol):
        return "fail"
    turning = np.sum(np.angle(steps / prev))
    if abs(turning - 2 * np.pi) > 1e-6:
        return "fail"
    if np.any(np.abs(cross) <= tol):
        return "degenerate"
    return "convex"


def _check_cycles(cycles) -> PolygonCheck:
    out = PolygonCheck()
    for n, steps in enumerate(cycles):
        verdict = _classify_polygon(steps)
        {"convex": out.convex_positive, "degenerate": out.degenerate, "fail": out.failed}[verdict].append(n)
    return out


@dataclass
class DelaunayReport:
    ratios: np.ndarray
    weights: np.ndarray
    k: float
    max_imag: float
    max_rel_error: float
    all_positive: bool
    primal_faces: PolygonCheck
    dual_faces: PolygonCheck
    period_defect: float

    @property
    def ratios_ok(self) -> bool:
        return self.all_positive and self.max_imag <= REAL_RTOL and self.max_rel_error <= RATIO_RTOL

    @property
    def periods_ok(self) -> bool:
        return self.period_defect < PERIOD_TOL

    @property
    def passed(self) -> bool:
        return self.ratios_ok and self.primal_faces.ok and self.dual_faces.ok and self.periods_ok

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def failures(self) -> list[str]:
        out = []
        if not self.all_positive:
            out.append("edge ratio not positive")
        if self.max_imag > REAL_RTOL:
            out.append("edge ratio not real")
        if self.max_rel_error > RATIO_RTOL:
            out.append("edge ratio differs from weight")
        if not self.primal_faces.ok:
            out.append(f"primal faces not convex/positive: {self.primal_faces.failed}")
        if not self.dual_faces.ok:
            out.append(f"dual faces not convex/positive: {self.dual_faces.failed}")
        if not self.periods_ok:
            out.append("period proportionality")
        return out

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "failures": self.failures(),
            "k": self.k,
            "ratio_max_imag": self.max_imag,
            "ratio_max_rel_error": self.max_rel_error,
            "ratios_positive": self.all_positive,
            "primal_faces": {
                "failed": self.primal_faces.failed,
                "degenerate": self.primal_faces.degenerate,
            },
            "dual_faces": {
                "failed": self.dual_faces.failed,
                "degenerate": self.dual_faces.degenerate,
            },
            "period_defect": self.period_defect,
        }


def delaunay_report(emb: TorusEmbedding, dual: DualEmbedding, weights: EdgeWeights, k: float) -> DelaunayReport:
    """Check the weighted Delaunay / dual Voronoi characterization at scale ``k``.

    ``r_e = (k/i) (h+_left - h+_right) / (h_head - h_tail)`` with ``h+ = h*/k``
    lifted by its own deck translations.
    """
    cx = emb.complex
    dcx = dual.complex
    hp = dual.positions / k
    deck = np.array(dual.deck) / k
    lifted = hp[dcx.heads] - hp[dcx.tails] + dcx.labels @ deck
    r = (k / 1j) * lifted / emb.displacements
    c = weights.values
    mag = np.max(np.abs(r), initial=0.0) or 1.0
    max_imag = float(np.max(np.abs(r.imag), initial=0.0) / mag)
    rel = np.abs(r - c) / np.maximum(np.abs(c), 1e-300)
    primal_cycles = [emb.displacements[idx] * sg for idx, sg in cx.face_edges]
    dual_cycles = [
        np.array([s * dual.displacements[e] / k for e, s in orbit]) for orbit in vertex_rotations(cx)
    ]
    t = emb.modulus.translations
    defect = float(np.max(np.abs(deck - t)) / np.max(np.abs(t)))
    return DelaunayReport(
        ratios=r,
        weights=c.copy(),
        k=float(k),
        max_imag=max_imag,
        max_rel_error=float(np.max(rel, initial=0.0)),
        all_positive=bool(np.all(r.real > 0)),
        primal_faces=_check_cycles(primal_cycles),
        dual_faces=_check_cycles(dual_cycles),
        period_defect=defect,
    )


def conjugate_defect(dual: DualEmbedding, tau) -> tuple[float, float]:
    """Scale-free proportionality defect of the measured conjugate deck translations."""
    return proportionality_defect(dual.deck, tau)
