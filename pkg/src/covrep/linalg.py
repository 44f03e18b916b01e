"""Dense complex linear algebra with explicit tolerance control.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the single validation gate. Subspaces carry an orthonormal column basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .config import resolve_tol

EPS = np.finfo(np.float64).eps


class FactorizationError(RuntimeError):
    """SVD or eigendecomposition did not converge."""


class DimensionError(ValueError):
    """Operands live in spaces of different dimension."""


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a finite 2-D complex128 array (copying only if needed)."""
    a = np.asarray(m)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    a = a.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def adj(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def fro(m: np.ndarray) -> float:
    return float(np.linalg.norm(m)) if m.size else 0.0


def opnorm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


class SvdResult(NamedTuple):
    left: np.ndarray
    singular_values: np.ndarray
    right_adjoint: np.ndarray


def svd(m, full: bool = True) -> SvdResult:
    """Deterministic LAPACK SVD; singular values come back nonincreasing."""
    a = as_matrix(m)
    rows, cols = a.shape
    if a.size == 0:
        return SvdResult(eye(rows), np.zeros(0), eye(cols))
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=full)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(f"factorization failed: SVD did not converge ({exc})") from exc
    return SvdResult(u, s, vh)


def eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian eigendecomposition of the hermitian part of ``m``."""
    h = 0.5 * (m + adj(m))
    try:
        return np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(f"factorization failed: eigh did not converge ({exc})") from exc


def default_rank_tol(shape: tuple[int, int], s_max: float) -> float:
    return max(shape) * EPS * s_max


def rank_cut(shape: tuple[int, int], s_max: float, tol: float | None = None) -> float:
    """Cutoff used for structural rank decisions.

    The larger of the machine-precision cutoff and ``tol`` relative to the
    largest singular value; products of several factors carry more rounding
    than a single SVD does.
    """
    return max(default_rank_tol(shape, s_max), resolve_tol(tol) * s_max)


def pinv(m, rank_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose inverse via SVD.

    Singular values at or below ``rank_tol`` are treated as zero. The default
    cutoff is ``max(rows, cols) * eps * s_max``.
    """
    a = as_matrix(m)
    rows, cols = a.shape
    if a.size == 0:
        return np.zeros((cols, rows), dtype=np.complex128)
    u, s, vh = svd(a, full=False)
    s_max = float(s[0]) if s.size else 0.0
    cut = default_rank_tol(a.shape, s_max) if rank_tol is None else float(rank_tol)
    if cut < 0:
        raise ValueError("rank_tol must be nonnegative")
    keep = s > cut
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (adj(vh) * inv) @ adj(u)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of C^ambient given by orthonormal basis columns."""

    basis: np.ndarray
    tol: float = 1e-10

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def __repr__(self) -> str:
        return f"Subspace(ambient={self.ambient}, dim={self.dim})"

    @classmethod
    def zero(cls, ambient: int, tol: float | None = None) -> "Subspace":
        return cls(np.zeros((ambient, 0), dtype=np.complex128), resolve_tol(tol))

    @classmethod
    def full(cls, ambient: int, tol: float | None = None) -> "Subspace":
        return cls(eye(ambient), resolve_tol(tol))

    @classmethod
    def span(cls, vectors, tol: float | None = None) -> "Subspace":
        """Orthonormal basis of the column span of ``vectors``."""
        return onb_range(vectors, tol=tol)

    @classmethod
    def coordinates(cls, ambient: int, indices: Iterable[int], tol: float | None = None) -> "Subspace":
        idx = sorted(set(int(i) for i in indices))
        return cls(eye(ambient)[:, idx], resolve_tol(tol))

    def orthonormality_residual(self) -> float:
        return fro(adj(self.basis) @ self.basis - eye(self.dim))


def _split(m, rank_tol: float | None, tol: float | None):
    a = as_matrix(m)
    # a thin SVD already has the whole of V* when rows >= cols; full U is never needed
    u, s, vh = svd(a, full=a.shape[0] < a.shape[1])
    s_max = float(s[0]) if s.size else 0.0
    cut = rank_cut(a.shape, s_max, tol) if rank_tol is None else float(rank_tol)
    r = int(np.sum(s > cut))
    return u, vh, r


def onb_range(m, rank_tol: float | None = None, tol: float | None = None) -> Subspace:
    u, _, r = _split(m, rank_tol, tol)
    return Subspace(u[:, :r], resolve_tol(tol))


def onb_kernel(m, rank_tol: float | None = None, tol: float | None = None) -> Subspace:
    _, vh, r = _split(m, rank_tol, tol)
    return Subspace(adj(vh[r:]), resolve_tol(tol))


def range_and_kernel(m, rank_tol: float | None = None, tol: float | None = None) -> tuple[Subspace, Subspace]:
    """Range and kernel from one factorization, so their ranks always add up."""
    u, vh, r = _split(m, rank_tol, tol)
    t = resolve_tol(tol)
    return Subspace(u[:, :r], t), Subspace(adj(vh[r:]), t)


def coimage(m, rank_tol: float | None = None, tol: float | None = None) -> Subspace:
    """N(M)^perp, i.e. the range of M*."""
    _, vh, r = _split(m, rank_tol, tol)
    return Subspace(adj(vh[:r]), resolve_tol(tol))


def projector(s: Subspace) -> np.ndarray:
    return s.basis @ adj(s.basis)


def complement(s: Subspace) -> Subspace:
    if s.dim == 0:
        return Subspace.full(s.ambient, s.tol)
    u, _, _ = svd(s.basis, full=True)
    return Subspace(u[:, s.dim:], s.tol)


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def lift_identity(count: int, m) -> np.ndarray:
    """``I_count (x) m``, the block-diagonal repetition of ``m``."""
    return kron(eye(count), m)


def tensor_subspace(count: int, s: Subspace) -> Subspace:
    """C^count (x) S; the Kronecker basis is again orthonormal."""
    return Subspace(lift_identity(count, s.basis), s.tol)


def image(m, s: Subspace, tol: float | None = None) -> Subspace:
    """Orthonormal basis of M(S)."""
    a = as_matrix(m)
    if a.shape[1] != s.ambient:
        raise DimensionError(f"operator has {a.shape[1]} columns, subspace ambient is {s.ambient}")
    if s.dim == 0:
        return Subspace.zero(a.shape[0], tol if tol is not None else s.tol)
    return onb_range(a @ s.basis, tol=tol if tol is not None else s.tol)


def _same_ambient(subspaces: Sequence[Subspace]) -> int:
    amb = {s.ambient for s in subspaces}
    if len(amb) != 1:
        raise DimensionError(f"ambient dimensions differ: {sorted(amb)}")
    return amb.pop()


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """A ∩ B as the kernel of the stacked complement projectors."""
    n = _same_ambient([a, b])
    tol = max(a.tol, b.tol)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(n, tol)
    stacked = np.vstack([eye(n) - projector(a), eye(n) - projector(b)])
    _, s, vh = svd(stacked, full=True)
    r = int(np.sum(s > tol))
    return Subspace(adj(vh[r:]), tol)


def subspace_join(subspaces: Sequence[Subspace]) -> Subspace:
    subspaces = list(subspaces)
    if not subspaces:
        raise ValueError("join of an empty family needs an ambient dimension")
    n = _same_ambient(subspaces)
    tol = max(s.tol for s in subspaces)
    cols = [s.basis for s in subspaces if s.dim]
    if not cols:
        return Subspace.zero(n, tol)
    stacked = np.hstack(cols)
    u, s, _ = svd(stacked, full=False)
    r = int(np.sum(s > max(tol, default_rank_tol(stacked.shape, float(s[0])))))
    return Subspace(u[:, :r], tol)


def leq_residual(a: Subspace, b: Subspace) -> float:
    """‖(I - P_B) A‖_F over the basis of A."""
    _same_ambient([a, b])
    if a.dim == 0:
        return 0.0
    if b.dim == 0:
        return fro(a.basis)
    return fro(a.basis - b.basis @ (adj(b.basis) @ a.basis))


def tensor_leq_residual(a: Subspace, count: int, s: Subspace) -> float:
    """leq_residual(a, tensor_subspace(count, s)) without forming the Kronecker basis."""
    if a.ambient != count * s.ambient:
        raise DimensionError(f"ambient {a.ambient} is not {count} x {s.ambient}")
    if a.dim == 0:
        return 0.0
    blocks = a.basis.reshape(count, s.ambient, a.dim)
    if s.dim == 0:
        return fro(a.basis)
    proj = np.einsum("hr,crd->chd", s.basis, np.einsum("hr,chd->crd", s.basis.conj(), blocks))
    return fro((blocks - proj).reshape(a.ambient, a.dim))


def subspace_leq(a: Subspace, b: Subspace, tol: float | None = None) -> bool:
    t = max(a.tol, b.tol) if tol is None else tol
    return leq_residual(a, b) <= t * (1 + a.dim)


def subspace_equal(a: Subspace, b: Subspace, tol: float | None = None) -> bool:
    return a.dim == b.dim and subspace_leq(a, b, tol) and subspace_leq(b, a, tol)


def equality_residual(a: Subspace, b: Subspace) -> float:
    return max(leq_residual(a, b), leq_residual(b, a))


def orthogonality_residual(a: Subspace, b: Subspace) -> float:
    """Norm of the cross-Gram matrix A* B."""
    _same_ambient([a, b])
    if a.dim == 0 or b.dim == 0:
        return 0.0
    return fro(adj(a.basis) @ b.basis)
