"""Small dense real matrix kernels.

Norms are Euclidean operator norms (largest singular value), co-norms the
smallest singular value.  A *word* is a tuple of 1-based symbols; its product
applies the first symbol first, so ``(w1, ..., wm)`` maps to
``S[wm] @ ... @ S[w1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InputError, NumericError, SingularMatrixError

DEFAULT_ATOL = 1e-9
DEFAULT_NONSINGULARITY_TOL = 1e-10

Word = tuple


def as_matrix(A) -> np.ndarray:
    M = np.array(A, dtype=float)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise InputError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InputError("matrix has non-finite entries")
    return M


def singular_values(A) -> np.ndarray:
    """Singular values in decreasing order."""
    M = as_matrix(A)
    try:
        return np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError(f"SVD did not converge: {exc}") from exc


def operator_norm(A) -> float:
    return float(singular_values(A)[0])


def co_norm(A) -> float:
    """min over unit x of |Ax|, i.e. the smallest singular value."""
    return float(singular_values(A)[-1])


def eigenvalues(A) -> np.ndarray:
    M = as_matrix(A)
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"eigenvalue iteration failed for matrix with norm {np.linalg.norm(M):.3g}: {exc}"
        ) from exc


def spectral_radius(A) -> float:
    return float(np.max(np.abs(eigenvalues(A))))


def co_spectral_radius(A, nonsingularity_tol: float = DEFAULT_NONSINGULARITY_TOL) -> float:
    """1 / rho(A^-1), computed as the smallest eigenvalue modulus of A."""
    M = as_matrix(A)
    smin = co_norm(M)
    if smin <= nonsingularity_tol:
        raise DomainError(f"co-spectral radius undefined: matrix is singular (sigma_min={smin:.3g})")
    return float(np.min(np.abs(eigenvalues(M))))


# -- batched kernels over arrays of shape (B, d, d) -------------------------


def batch_norms(P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(operator norms, co-norms) for a stack of matrices."""
    if P.shape[-1] == 1:
        a = np.abs(P[:, 0, 0])
        return a, a
    sv = np.linalg.svd(P, compute_uv=False)
    return sv[:, 0], sv[:, -1]


def batch_spectral_radius(P: np.ndarray) -> np.ndarray:
    if P.shape[-1] == 1:
        return np.abs(P[:, 0, 0])
    return np.max(np.abs(np.linalg.eigvals(P)), axis=1)


def batch_co_spectral_radius(P: np.ndarray) -> np.ndarray:
    if P.shape[-1] == 1:
        return np.abs(P[:, 0, 0])
    return np.min(np.abs(np.linalg.eigvals(P)), axis=1)


# -- words -----------------------------------------------------------------


def as_word(symbols: Iterable[int], K: int | None = None, allow_empty: bool = False) -> Word:
    w = tuple(int(s) for s in symbols)
    if not w and not allow_empty:
        raise DomainError("empty word")
    for s in w:
        if s < 1 or (K is not None and s > K):
            raise InputError(f"symbol {s} outside alphabet 1..{K}")
    return w


def product(matrices: Sequence[np.ndarray], word: Sequence[int]) -> np.ndarray:
    """Left fold from the first symbol; no nonsingularity requirement."""
    if len(word) == 0:
        raise DomainError("empty word has no product; use the identity explicitly")
    P = np.array(matrices[word[0] - 1], dtype=float)
    for s in word[1:]:
        P = matrices[s - 1] @ P
    return P


# -- the system ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """K nonsingular d-by-d real matrices plus numerical tolerances."""

    matrices: np.ndarray
    nonsingularity_tol: float = DEFAULT_NONSINGULARITY_TOL
    atol: float = DEFAULT_ATOL
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        mats = [as_matrix(M) for M in self.matrices]
        if not mats:
            raise InputError("a system needs at least one matrix")
        d = mats[0].shape[0]
        for i, M in enumerate(mats, 1):
            if M.shape != (d, d):
                raise InputError(f"matrix {i} has shape {M.shape}, expected {(d, d)}")
        if not self.nonsingularity_tol > 0 or not self.atol > 0:
            raise InputError("tolerances must be positive")
        arr = np.stack(mats)
        arr.setflags(write=False)
        object.__setattr__(self, "matrices", arr)
        for i, M in enumerate(arr, 1):
            smin = co_norm(M)
            if smin <= self.nonsingularity_tol:
                raise SingularMatrixError(i, smin, self.nonsingularity_tol)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != len(arr):
                raise InputError("one label per matrix is required")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, *matrices, **kwargs) -> "SystemSpec":
        return cls(np.array([as_matrix(M) for M in matrices]), **kwargs)

    @property
    def K(self) -> int:
        return self.matrices.shape[0]

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @cached_property
    def inverses(self) -> np.ndarray:
        inv = np.linalg.inv(self.matrices)
        inv.setflags(write=False)
        return inv

    @cached_property
    def max_norm(self) -> float:
        return float(max(operator_norm(M) for M in self.matrices))

    @cached_property
    def min_conorm(self) -> float:
        return float(min(co_norm(M) for M in self.matrices))

    def inverse_system(self) -> "SystemSpec":
        return SystemSpec(np.array(self.inverses), self.nonsingularity_tol, self.atol, self.labels)

    def scaled(self, c: float) -> "SystemSpec":
        return SystemSpec(c * self.matrices, self.nonsingularity_tol, self.atol, self.labels)

    def __eq__(self, other):
        if not isinstance(other, SystemSpec):
            return NotImplemented
        return (
            self.matrices.shape == other.matrices.shape
            and bool(np.array_equal(self.matrices, other.matrices))
            and self.nonsingularity_tol == other.nonsingularity_tol
            and self.atol == other.atol
            and self.labels == other.labels
        )

    __hash__ = None


def word_product(sys: SystemSpec, w: Sequence[int]) -> np.ndarray:
    """S[w_m] ... S[w_1], evaluated as a left fold starting at w_1."""
    return product(sys.matrices, as_word(w, sys.K))


# -- overflow-safe running products ----------------------------------------


def _norm2x2(a: float, b: float, c: float, d: float) -> float:
    p = math.hypot(a + d, c - b)
    q = math.hypot(a - d, b + c)
    return 0.5 * (p + q)


class ScaledProduct:
    """Running product P = exp(log_scale) * unit, carried with its inverse.

    ``unit`` has Frobenius norm 1.  The inverse is tracked separately so the
    co-norm comes out as 1 / |P^-1| instead of from a tiny singular value of
    an ill-conditioned matrix.
    """

    __slots__ = ("unit", "log_scale", "inv_unit", "inv_log_scale")

    def __init__(self, unit, log_scale, inv_unit, inv_log_scale):
        self.unit = unit
        self.log_scale = log_scale
        self.inv_unit = inv_unit
        self.inv_log_scale = inv_log_scale

    @classmethod
    def identity(cls, d: int) -> "ScaledProduct":
        I = np.eye(d) / math.sqrt(d)
        return cls(I, 0.5 * math.log(d), I.copy(), 0.5 * math.log(d))

    @classmethod
    def of(cls, P: np.ndarray) -> "ScaledProduct":
        return cls.identity(P.shape[0]).then(P, np.linalg.inv(P))

    def then(self, A: np.ndarray, A_inv: np.ndarray, times: int = 1) -> "ScaledProduct":
        """Left-multiply by A (``times`` times)."""
        U, s, V, t = self.unit, self.log_scale, self.inv_unit, self.inv_log_scale
        for _ in range(times):
            U = A @ U
            f = float(np.linalg.norm(U))
            if not (f > 0 and math.isfinite(f)):
                raise NumericError("running product lost all magnitude")
            U = U / f
            s += math.log(f)
            V = V @ A_inv
            g = float(np.linalg.norm(V))
            V = V / g
            t += math.log(g)
        return ScaledProduct(U, s, V, t)

    def log_norm(self) -> float:
        return self.log_scale + math.log(_opnorm(self.unit))

    def log_conorm(self) -> float:
        return -(self.inv_log_scale + math.log(_opnorm(self.inv_unit)))

    def matrix(self) -> np.ndarray:
        return math.exp(self.log_scale) * self.unit


def _opnorm(U: np.ndarray) -> float:
    if U.shape == (1, 1):
        return abs(float(U[0, 0]))
    if U.shape == (2, 2):
        return _norm2x2(float(U[0, 0]), float(U[0, 1]), float(U[1, 0]), float(U[1, 1]))
    return float(np.linalg.svd(U, compute_uv=False)[0])


def product_ledger(sys: SystemSpec, symbols: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Natural-log norm and co-norm of every prefix product.

    Entry ``n-1`` refers to ``S[s_n] ... S[s_1]``.
    """
    sym = np.asarray(symbols, dtype=np.int64)
    N = sym.size
    if N == 0:
        return np.empty(0), np.empty(0)
    if sym.min() < 1 or sym.max() > sys.K:
        raise InputError("symbol outside alphabet")
    d = sys.dim
    if d == 1:
        logs = np.log(np.abs(sys.matrices[:, 0, 0]))[sym - 1]
        ln = np.cumsum(logs)
        return ln, ln.copy()
    out_n = np.empty(N)
    out_c = np.empty(N)
    if d == 2:
        F = [tuple(float(v) for v in M.ravel()) for M in sys.matrices]
        G = [tuple(float(v) for v in M.ravel()) for M in sys.inverses]
        u0, u1, u2, u3 = 1.0, 0.0, 0.0, 1.0
        v0, v1, v2, v3 = 1.0, 0.0, 0.0, 1.0
        s = t = 0.0
        hyp, log = math.hypot, math.log
        for i, k in enumerate(sym.tolist()):
            a, b, c, e = F[k - 1]
            u0, u1, u2, u3 = a * u0 + b * u2, a * u1 + b * u3, c * u0 + e * u2, c * u1 + e * u3
            f = hyp(hyp(u0, u1), hyp(u2, u3))
            u0, u1, u2, u3 = u0 / f, u1 / f, u2 / f, u3 / f
            s += log(f)
            a, b, c, e = G[k - 1]
            v0, v1, v2, v3 = v0 * a + v1 * c, v0 * b + v1 * e, v2 * a + v3 * c, v2 * b + v3 * e
            g = hyp(hyp(v0, v1), hyp(v2, v3))
            v0, v1, v2, v3 = v0 / g, v1 / g, v2 / g, v3 / g
            t += log(g)
            out_n[i] = s + log(_norm2x2(u0, u1, u2, u3))
            out_c[i] = -(t + log(_norm2x2(v0, v1, v2, v3)))
        return out_n, out_c
    P = ScaledProduct.identity(d)
    for i, k in enumerate(sym.tolist()):
        P = P.then(sys.matrices[k - 1], sys.inverses[k - 1])
        out_n[i] = P.log_norm()
        out_c[i] = P.log_conorm()
    return out_n, out_c
