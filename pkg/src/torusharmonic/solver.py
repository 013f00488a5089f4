"""Incidence matrix, weighted Laplacian and the harmonic 1-form solve.

With ``d`` the E x V incidence matrix, ``C`` the diagonal weight matrix and
``M`` the E x 2 matrix of label forms, every closed form is
``omega = d f + M (A, B)^T``.  It is harmonic when ``d^T C omega = 0``,
which after pinning ``f`` at a root vertex ``o`` is the reduced system

    Delta_oo f_o = -d_o^T C M (A, B)^T,     Delta = d^T C d.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.linalg import lapack

from .errors import ConsistencyError, DegenerateWeightsError
from .forms import OneForm
from .topology import EdgeWeights, ToroidalComplex

PIVOT_RTOL = 1e-12
EIG_ZERO_RTOL = 1e-9
ROUTE_RTOL = 1e-7


class _SymmetricFactor:
    """Factor-once, solve-many wrapper for a symmetric matrix.

    Cholesky when the matrix is positive definite, Bunch-Kaufman
    (LAPACK ``sytrf``) otherwise.
    """

    def __init__(self, A: np.ndarray):
        self.n = A.shape[0]
        self.kind = "empty"
        if self.n == 0:
            return
        try:
            self._chol = sla.cho_factor(A, lower=True, check_finite=True)
            self.kind = "cholesky"
            return
        except np.linalg.LinAlgError:
            pass
        lu, ipiv, info = lapack.dsytrf(A, lower=1)
        if info != 0:
            raise DegenerateWeightsError(
                f"reduced Laplacian is singular (sytrf info={info}): degenerate weights",
                pivot_index=int(info) - 1 if info > 0 else None,
            )
        scale = np.max(np.abs(np.diag(A))) or 1.0
        d = np.abs(np.diag(lu))
        if np.min(d) <= PIVOT_RTOL * scale:
            raise DegenerateWeightsError("reduced Laplacian is numerically singular: degenerate weights")
        self._lu, self._ipiv = lu, ipiv
        self.kind = "bunch-kaufman"

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if self.n == 0:
            return np.zeros_like(rhs)
        if self.kind == "cholesky":
            return sla.cho_solve(self._chol, rhs)
        x, info = lapack.dsytrs(self._lu, self._ipiv, rhs, lower=1)
        if info != 0:
            raise DegenerateWeightsError(f"sytrs failed (info={info})")
        return x


@dataclass(frozen=True)
class NondegeneracyCheck:
    ok: bool
    pivots: np.ndarray
    scale: float
    failing_index: int | None = None

    def __bool__(self) -> bool:
        return self.ok

    @property
    def failing_pivot(self) -> float | None:
        return None if self.failing_index is None else float(self.pivots[self.failing_index])

    @property
    def min_pivot(self) -> float:
        return float(np.min(self.pivots)) if self.pivots.size else float("inf")


def _ldl_pivots(G: np.ndarray, thr: float) -> tuple[np.ndarray, int | None]:
    """Pivots of the unpivoted LDL^T elimination, stopping at the first one <= thr."""
    A = np.array(G, dtype=float)
    n = A.shape[0]
    piv = []
    for k in range(n):
        p = A[k, k]
        piv.append(p)
        if not p > thr:
            return np.array(piv), k
        col = A[k + 1 :, k] / p
        A[k + 1 :, k + 1 :] -= np.outer(col, A[k, k + 1 :])
    return np.array(piv), None


class OperatorBundle:
    """All matrices needed for harmonic forms on one weighted complex.

    Immutable after construction; the reduced Laplacian is factored once on
    first use and shared by every later solve.
    """

    def __init__(self, cx: ToroidalComplex, weights: EdgeWeights, root: int = 0):
        cx.require_valid()
        if len(weights) != cx.num_edges:
            raise ValueError(f"{len(weights)} weights for {cx.num_edges} edges")
        if not 0 <= root < cx.num_vertices:
            raise ValueError(f"root {root} is not a vertex")
        self.complex = cx
        self.weights = weights
        self.root = root
        E, V = cx.num_edges, cx.num_vertices
        rows = np.concatenate([np.arange(E), np.arange(E)])
        cols = np.concatenate([cx.heads, cx.tails])
        vals = np.concatenate([np.ones(E), -np.ones(E)])
        # loops: +1 and -1 land in the same slot and cancel
        self.d = sp.csr_matrix((vals, (rows, cols)), shape=(E, V))
        self.c = weights.values
        self.M = cx.labels.astype(float)
        self.keep = np.delete(np.arange(V), root)

    # -- dense blocks ------------------------------------------------------------

    @cached_property
    def C(self) -> sp.dia_matrix:
        return sp.diags(self.c)

    @cached_property
    def laplacian(self) -> np.ndarray:
        """``d^T C d``; note ``(Delta f)_i = -sum_j c_ij (f_j - f_i)`` in this sign."""
        cx, c = self.complex, self.c
        V = cx.num_vertices
        K = np.zeros((V, V))
        keep = cx.tails != cx.heads  # loops contribute nothing
        t, h, c = cx.tails[keep], cx.heads[keep], c[keep]
        np.add.at(K, (h, h), c)
        np.add.at(K, (t, t), c)
        np.add.at(K, (h, t), -c)
        np.add.at(K, (t, h), -c)
        return K

    @cached_property
    def d_tilde(self) -> sp.csr_matrix:
        return sp.hstack([self.d, sp.csr_matrix(self.M)], format="csr")

    @cached_property
    def gram_full(self) -> np.ndarray:
        """``d~^T C d~``, size (V+2) x (V+2)."""
        return np.asarray((self.d_tilde.T @ self.C @ self.d_tilde).todense())

    @cached_property
    def d_red(self) -> sp.csr_matrix:
        return self.d[:, self.keep]

    @cached_property
    def lap_red(self) -> np.ndarray:
        return self.laplacian[np.ix_(self.keep, self.keep)]

    @cached_property
    def coupling(self) -> np.ndarray:
        """``d_o^T C M``, size (V-1) x 2."""
        return self._incidence_t(self.c[:, None] * self.M)[self.keep]

    def _incidence_t(self, X: np.ndarray) -> np.ndarray:
        """``d^T X`` without forming ``d``: heads collect ``+X``, tails ``-X``."""
        out = np.zeros((self.complex.num_vertices,) + X.shape[1:])
        np.add.at(out, self.complex.heads, X)
        np.add.at(out, self.complex.tails, -X)
        return out

    @cached_property
    def label_gram(self) -> np.ndarray:
        """``M^T C M``."""
        return self.M.T @ (self.c[:, None] * self.M)

    @cached_property
    def gram_red(self) -> np.ndarray:
        """``d~_o^T C d~_o``: the energy form on closed 1-forms in the basis (d_o, M)."""
        top = np.hstack([self.lap_red, self.coupling])
        bottom = np.hstack([self.coupling.T, self.label_gram])
        return np.vstack([top, bottom])

    @cached_property
    def factor(self) -> _SymmetricFactor:
        return _SymmetricFactor(self.lap_red)

    def with_root(self, root: int) -> "OperatorBundle":
        return OperatorBundle(self.complex, self.weights, root)

    # -- solves -----------------------------------------------------------------

    def potentials(self, P: np.ndarray) -> np.ndarray:
        """Vertex potentials ``f`` (zero at root) for period columns ``P`` (2 x k)."""
        P = np.asarray(P, dtype=float).reshape(2, -1)
        f = np.zeros((self.complex.num_vertices, P.shape[1]))
        f[self.keep] = -self.factor.solve(self.coupling @ P)
        return f

    def harmonic_values(self, P: np.ndarray) -> np.ndarray:
        """Edge values of the harmonic forms with period columns ``P`` (E x k)."""
        P = np.asarray(P, dtype=float).reshape(2, -1)
        f = self.potentials(P)
        return (self.d @ f) + self.M @ P


def build_operators(cx: ToroidalComplex, weights: EdgeWeights, root: int = 0) -> OperatorBundle:
    return OperatorBundle(cx, weights, root)


def harmonic_form(bundle: OperatorBundle, periods) -> OneForm:
    """The closed, weighted co-closed 1-form with the given periods ``(A, B)``."""
    vals = bundle.harmonic_values(np.asarray(periods, dtype=float).reshape(2, 1))
    return OneForm(bundle.complex, vals[:, 0])


def check_nondegenerate(bundle: OperatorBundle) -> NondegeneracyCheck:
    """Positive definiteness of the energy on closed 1-forms.

    Attempts an LDL^T factorization of ``d~_o^T C d~_o``; every pivot must
    exceed ``1e-12`` times the largest diagonal entry.
    """
    G = bundle.gram_red
    diag = np.abs(np.diag(G))
    scale = float(diag.max()) if diag.size else 0.0
    thr = PIVOT_RTOL * scale
    if scale == 0.0:
        return NondegeneracyCheck(False, np.diag(G).copy(), scale, 0)
    try:
        L = np.linalg.cholesky(G)
        piv = np.diag(L) ** 2
        bad = np.flatnonzero(piv <= thr)
        if bad.size == 0:
            return NondegeneracyCheck(True, piv, scale)
    except np.linalg.LinAlgError:
        pass
    piv, k = _ldl_pivots(G, thr)
    return NondegeneracyCheck(k is None, piv, scale, k)


def require_nondegenerate(bundle: OperatorBundle) -> NondegeneracyCheck:
    chk = check_nondegenerate(bundle)
    if not chk:
        raise DegenerateWeightsError(
            f"degenerate weights: Gram pivot {chk.failing_index} = {chk.failing_pivot:.6g} "
            f"is not > {PIVOT_RTOL:g} * {chk.scale:.6g}",
            pivot_index=chk.failing_index,
            pivot=chk.failing_pivot,
        )
    return chk


def det0(matrix: np.ndarray, kernel_dim: int | None = None) -> float:
    """Product of the non-zero eigenvalues of a symmetric matrix.

    Eigenvalues with ``|lambda| <= 1e-9 * max|lambda|`` count as zero.  When
    ``kernel_dim`` is given the number of zero eigenvalues must match it.
    """
    A = np.asarray(matrix, dtype=float)
    if A.size == 0:
        return 1.0
    ev = np.linalg.eigvalsh(A)
    thr = EIG_ZERO_RTOL * np.max(np.abs(ev))
    nz = ev[np.abs(ev) > thr]
    if kernel_dim is not None and ev.size - nz.size != kernel_dim:
        raise ConsistencyError(
            f"det0: found kernel of dimension {ev.size - nz.size}, expected {kernel_dim}"
        )
    sign = np.prod(np.sign(nz)) if nz.size else 1.0
    return float(sign * np.exp(np.sum(np.log(np.abs(nz)))))


def _logdet(A: np.ndarray) -> tuple[float, float]:
    if A.size == 0:
        return 1.0, 0.0
    return np.linalg.slogdet(A)


@dataclass(frozen=True)
class DetRatio:
    eigen: float
    reduced: float

    @property
    def value(self) -> float:
        return self.reduced


def det_ratio_routes(bundle: OperatorBundle) -> DetRatio:
    """Minimal energy from determinants, by the eigenvalue and reduced routes."""
    require_nondegenerate(bundle)
    num = det0(bundle.gram_full, kernel_dim=1)
    den = det0(bundle.laplacian, kernel_dim=1)
    k_eig = float(np.sqrt(num / den))
    s1, l1 = _logdet(bundle.gram_red)
    s2, l2 = _logdet(bundle.lap_red)
    if s1 <= 0 or s2 <= 0:
        raise DegenerateWeightsError("reduced determinants are not positive")
    k_red = float(np.exp(0.5 * (l1 - l2)))
    if abs(k_eig - k_red) > ROUTE_RTOL * abs(k_red):
        raise ConsistencyError(f"det0 routes disagree: eigen {k_eig!r} vs reduced {k_red!r}")
    return DetRatio(k_eig, k_red)


def k_from_det_ratio(bundle: OperatorBundle) -> float:
    return det_ratio_routes(bundle).value
