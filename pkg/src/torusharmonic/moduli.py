"""Response matrix on the period space and the optimal flat structure.

Conventions: ``J = [[0, 1], [-1, 0]]``.  The response matrix ``L`` sends the
periods of a harmonic form to the periods of its conjugate on the dual
complex, and equals ``J^{-1} S`` where ``S`` is the Schur complement of the
reduced Laplacian in ``d~_o^T C d~_o``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResponseMatrixError
from .solver import OperatorBundle, require_nondegenerate

J = np.array([[0.0, 1.0], [-1.0, 0.0]])
J_INV = -J
SKEW_RTOL = 1e-9


@dataclass(frozen=True)
class Modulus:
    """Point of the upper half plane naming the unit-area torus ``S_tau``."""

    tau: complex

    def __post_init__(self):
        t = complex(self.tau)
        if not t.imag > 0:
            raise ValueError(f"modulus must have positive imaginary part, got {t}")
        object.__setattr__(self, "tau", t)

    @classmethod
    def from_parts(cls, re: float, im: float) -> "Modulus":
        return cls(complex(re, im))

    @property
    def re(self) -> float:
        return self.tau.real

    @property
    def im(self) -> float:
        return self.tau.imag

    @property
    def t1(self) -> complex:
        return complex(1.0 / np.sqrt(self.im))

    @property
    def t2(self) -> complex:
        return self.tau / np.sqrt(self.im)

    @property
    def translations(self) -> np.ndarray:
        return np.array([self.t1, self.t2])

    @property
    def area(self) -> float:
        return float((self.t1.conjugate() * self.t2).imag)

    def real_periods(self) -> np.ndarray:
        """Period columns of ``Re h`` and ``Im h`` for the lift into ``S_tau`` (2 x 2)."""
        s = np.sqrt(self.im)
        return np.array([[1.0 / s, 0.0], [self.re / s, self.im / s]])


@dataclass(frozen=True)
class ResponseMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float).reshape(2, 2)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def a(self) -> float:
        return float(self.matrix[0, 0])

    @property
    def b(self) -> float:
        return float(self.matrix[0, 1])

    @property
    def c(self) -> float:
        return float(self.matrix[1, 0])

    @property
    def d(self) -> float:
        return float(self.matrix[1, 1])

    def __call__(self, periods) -> np.ndarray:
        return self.matrix @ np.asarray(periods, dtype=float)

    @property
    def energy_matrix(self) -> np.ndarray:
        """``J L``: twice the energy of the harmonic form with periods ``U`` is ``U^T (J L) U``."""
        return J @ self.matrix

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def invariant_violations(self) -> list[str]:
        out = []
        scale = max(np.max(np.abs(self.matrix)), 1e-300)
        if abs(self.a + self.d) > SKEW_RTOL * scale:
            out.append(f"a + d = {self.a + self.d:.3e} is not zero")
        if not self.b < 0:
            out.append(f"b = {self.b:.6g} is not negative")
        if not self.c > 0:
            out.append(f"c = {self.c:.6g} is not positive")
        if not -self.b * self.c - self.a**2 > 0:
            out.append(f"-bc - a^2 = {-self.b * self.c - self.a ** 2:.6g} is not positive")
        return out


@dataclass(frozen=True)
class OptimalStructure:
    modulus: Modulus
    k: float

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("minimal energy must be positive")

    @property
    def tau(self) -> complex:
        return self.modulus.tau


def schur_complement(bundle: OperatorBundle) -> np.ndarray:
    """``-M^T C d_o Delta_oo^{-1} d_o^T C M + M^T C M``."""
    X = bundle.factor.solve(bundle.coupling)
    return bundle.label_gram - bundle.coupling.T @ X


def response_matrix(bundle: OperatorBundle) -> ResponseMatrix:
    require_nondegenerate(bundle)
    return ResponseMatrix(J_INV @ schur_complement(bundle))


def extract_modulus(L: ResponseMatrix) -> OptimalStructure:
    bad = L.invariant_violations()
    if bad:
        raise ResponseMatrixError(
            "not a response matrix of a non-degenerate network: " + "; ".join(bad)
        )
    k = float(np.sqrt(-L.b * L.c - L.a**2))
    return OptimalStructure(Modulus(complex(-L.a / L.b, -k / L.b)), k)


def response_from_structure(opt: OptimalStructure) -> ResponseMatrix:
    """Inverse of :func:`extract_modulus`."""
    x, y, k = opt.modulus.re, opt.modulus.im, opt.k
    return ResponseMatrix(k / y * np.array([[x, -1.0], [x * x + y * y, -x]]))


def optimal_structure(bundle: OperatorBundle) -> OptimalStructure:
    return extract_modulus(response_matrix(bundle))


def energy_at(opt: OptimalStructure, tau: Modulus | complex) -> float:
    """Energy of the harmonic map into ``S_tau``; minimal (``= k``) exactly at ``tau_c``."""
    t = tau.tau if isinstance(tau, Modulus) else complex(tau)
    if not t.imag > 0:
        raise ValueError("tau must lie in the upper half plane")
    tc, k = opt.tau, opt.k
    return k * abs(t - tc) ** 2 / (2.0 * tc.imag * t.imag) + k


def conjugate_periods(opt: OptimalStructure, tau: Modulus | complex) -> tuple[complex, complex]:
    """Deck translations of the conjugate map of the harmonic map into ``S_tau``.

    Obtained from ``L`` applied to the periods of ``Re h`` and ``Im h``: the
    conjugate edge vector is ``-*eta + i *omega``.
    """
    m = tau if isinstance(tau, Modulus) else Modulus(complex(tau))
    L = response_from_structure(opt).matrix
    P = m.real_periods()
    star = L @ P  # columns: periods of *omega, *eta
    p = -star[:, 1] + 1j * star[:, 0]
    return complex(p[0]), complex(p[1])


def proportionality_defect(p: tuple[complex, complex], tau: Modulus | complex) -> tuple[float, float]:
    """How far ``(p1, p2)`` is from ``k (1, tau)/sqrt(Im tau)`` with real ``k``.

    Returns ``(defect, k_fit)`` where ``k_fit`` is the least-squares real
    factor and ``defect`` the relative residual.  A positive fit factor with
    zero defect means the conjugate projects to ``k S_tau``.
    """
    m = tau if isinstance(tau, Modulus) else Modulus(complex(tau))
    v = m.translations
    p = np.asarray(p, dtype=complex)
    k_fit = float(np.real(np.vdot(v, p)) / np.real(np.vdot(v, v)))
    defect = float(np.linalg.norm(p - k_fit * v) / max(np.linalg.norm(p), 1e-300))
    if k_fit <= 0:
        defect = max(defect, 1.0)
    return defect, k_fit
