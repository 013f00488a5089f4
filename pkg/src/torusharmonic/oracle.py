"""Brute-force minimization of the Dirichlet energy over maps and flat structures.

This module is deliberately independent of the response-matrix pipeline:
it assembles its own spring system, solves for the minimizing vertex
positions at a fixed modulus, sums edge energies directly and searches the
upper half plane with a finite-difference Newton method.  Nothing here calls
:mod:`torusharmonic.moduli` or :mod:`torusharmonic.solver`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import BoundaryEscapeError, ConsistencyError
from .topology import (
    EdgeWeights,
    ToroidalComplex,
    flip_edge,
    lifted_edge_keys,
    one_vertex_triangulation,
    triangulated_grid,
    vertex_degrees,
)

GRAD_TOL = 1e-10
MAX_OUTER = 500
START_AGREEMENT = 1e-6


class SpringSystem:
    """Energy ``1/2 sum c_e |p_head - p_tail + lattice_e|^2`` of a periodic spring network."""

    def __init__(self, cx: ToroidalComplex, weights: EdgeWeights):
        cx.require_valid()
        self.complex = cx
        self.c = np.asarray(weights.values, dtype=float)
        V = cx.num_vertices
        K = np.zeros((V, V))
        proper = cx.tails != cx.heads
        t, h, c = cx.tails[proper], cx.heads[proper], self.c[proper]
        np.add.at(K, (h, h), c)
        np.add.at(K, (t, t), c)
        np.add.at(K, (h, t), -c)
        np.add.at(K, (t, h), -c)
        self.stiffness = K
        self._lu = sla.lu_factor(K[1:, 1:]) if V > 1 else None

    def relax(self, tau: complex) -> np.ndarray:
        """Vertex positions minimizing the energy in ``S_tau``; vertex 0 pinned at 0."""
        y = tau.imag
        lattice = (self.complex.labels[:, 0] + self.complex.labels[:, 1] * tau) / np.sqrt(y)
        force = np.zeros(self.complex.num_vertices, dtype=complex)
        np.add.at(force, self.complex.heads, -self.c * lattice)
        np.add.at(force, self.complex.tails, self.c * lattice)
        pos = np.zeros(self.complex.num_vertices, dtype=complex)
        if self._lu is not None:
            pos[1:] = sla.lu_solve(self._lu, force[1:].real) + 1j * sla.lu_solve(self._lu, force[1:].imag)
        return pos

    def energy(self, tau: complex, positions: np.ndarray | None = None) -> float:
        if positions is None:
            positions = self.relax(tau)
        y = tau.imag
        lattice = (self.complex.labels[:, 0] + self.complex.labels[:, 1] * tau) / np.sqrt(y)
        vec = positions[self.complex.heads] - positions[self.complex.tails] + lattice
        return 0.5 * float(np.sum(self.c * np.abs(vec) ** 2))


@dataclass
class OracleRun:
    tau: complex
    energy: float
    iterations: int
    grad_norm: float
    stop_reason: str


@dataclass
class OracleResult:
    tau: complex
    energy: float
    positions: np.ndarray
    iterations: int
    grad_norm: float
    converged: bool
    runs: list[OracleRun] = field(default_factory=list)


def _as_complex(z) -> complex:
    return complex(z.tau) if hasattr(z, "tau") else complex(z)


def _newton(system: SpringSystem, tau0: complex) -> OracleRun:
    """Damped Newton on ``(Re tau, log Im tau)`` with central-difference derivatives."""

    def f(z):
        x, s = z
        if not (-50 < s < 50):
            raise BoundaryEscapeError(f"Im tau escaped to {np.exp(s):.3e}")
        return system.energy(complex(x, np.exp(s)))

    z = np.array([tau0.real, np.log(tau0.imag)])
    fz = f(z)
    g = np.zeros(2)
    it = 0
    reason = "max-iterations"
    for it in range(1, MAX_OUTER + 1):
        y = np.exp(z[1])
        h = np.array([1e-4 * y, 1e-4])
        g = np.zeros(2)
        H = np.zeros((2, 2))
        for i in range(2):
            ei = np.zeros(2)
            ei[i] = h[i]
            fp, fm = f(z + ei), f(z - ei)
            g[i] = (fp - fm) / (2 * h[i])
            H[i, i] = (fp - 2 * fz + fm) / h[i] ** 2
        e0, e1 = np.array([h[0], 0.0]), np.array([0.0, h[1]])
        H[0, 1] = H[1, 0] = (
            f(z + e0 + e1) - f(z + e0 - e1) - f(z - e0 + e1) + f(z - e0 - e1)
        ) / (4 * h[0] * h[1])
        grad_xy = np.hypot(g[0], g[1] / y)
        if grad_xy < GRAD_TOL:
            reason = "gradient"
            break
        try:
            np.linalg.cholesky(H)
            step = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = -g / max(np.linalg.norm(g), 1.0)
        step_len = np.linalg.norm(step)
        if step_len > 1.0:
            step /= step_len
        alpha, accepted = 1.0, False
        while alpha > 1e-12:
            trial = z + alpha * step
            ft = f(trial)
            if ft <= fz + 1e-4 * alpha * float(g @ step):
                accepted = True
                break
            alpha *= 0.5
        if not accepted or np.linalg.norm(alpha * step) < 1e-14:
            if accepted:
                z, fz = trial, ft
            reason = "stagnation"
            break
        z, fz = trial, ft
    tau = complex(z[0], np.exp(z[1]))
    if tau.imag < 1e-8 or tau.imag > 1e8:
        raise BoundaryEscapeError(f"iterate drifted to the boundary: tau = {tau}")
    return OracleRun(tau, fz, it, float(np.hypot(g[0], g[1] / np.exp(z[1]))), reason)


def minimize_energy(
    cx: ToroidalComplex,
    weights: EdgeWeights,
    tau0: complex = 1j,
    seed: int = 0,
    starts: int = 3,
) -> OracleResult:
    """Minimize the energy jointly over positions and modulus from several starts."""
    tau0 = _as_complex(tau0)
    if not tau0.imag > 0:
        raise ValueError("starting modulus must lie in the upper half plane")
    system = SpringSystem(cx, weights)
    rng = np.random.default_rng(seed)
    inits = [tau0]
    for _ in range(starts - 1):
        inits.append(complex(tau0.real + rng.normal(0.0, 0.3), tau0.imag * np.exp(rng.normal(0.0, 0.3))))
    runs = [_newton(system, t) for t in inits]
    best = min(runs, key=lambda r: r.energy)
    for r in runs:
        if abs(r.tau - best.tau) > START_AGREEMENT * max(1.0, abs(best.tau)):
            raise ConsistencyError(
                f"oracle starts disagree: {r.tau} vs {best.tau} (energies {r.energy}, {best.energy})"
            )
    return OracleResult(
        tau=best.tau,
        energy=best.energy,
        positions=system.relax(best.tau),
        iterations=best.iterations,
        grad_norm=best.grad_norm,
        converged=all(r.stop_reason in ("gradient", "stagnation") for r in runs),
        runs=runs,
    )


def _grid_shape(n: int) -> tuple[int, int]:
    a = int(np.floor(np.sqrt(n)))
    while n % a:
        a -= 1
    return n // a, a


def random_instance(num_vertices: int, seed: int = 0, flips: int | None = None) -> tuple[ToroidalComplex, EdgeWeights]:
    """Random triangulated torus with log-uniform weights in [0.1, 10].

    Starts from a near-square triangulated grid with ``num_vertices``
    vertices and applies random edge flips that keep the universal cover a
    simple triangulation with vertex degrees at least 3.
    """
    if num_vertices < 1:
        raise ValueError("num_vertices must be at least 1")
    rng = np.random.default_rng(seed)
    if num_vertices == 1:
        cx = one_vertex_triangulation()
    else:
        cx = triangulated_grid(*_grid_shape(num_vertices))
        n_flips = num_vertices if flips is None else flips
        for _ in range(n_flips):
            k = int(rng.integers(cx.num_edges))
            new = flip_edge(cx, k)
            if new is None:
                continue
            keys = lifted_edge_keys(new)
            t, h, dx, dy = keys[k]
            if t == h and dx == 0 and dy == 0:
                continue
            if len(set(keys)) != len(keys):
                continue
            if np.min(vertex_degrees(new)) < 3:
                continue
            if not new.report.valid:
                continue
            cx = new
    w = np.exp(rng.uniform(np.log(0.1), np.log(10.0), cx.num_edges))
    return cx, EdgeWeights(w)
