"""Covariant representations of E = C^n on H = C^dim_h, encoded by Ṽ.

Basis ordering is correspondence-index major: the vector
δ_{i1}⊗…⊗δ_{ik}⊗e_j sits at flat index ((i1·n + i2)·n + … + ik)·dim_h + j.
With this ordering I_{E^k} ⊗ Ṽ is literally ``kron(eye(n**k), Ṽ)``, and the
generator V_i = V(δ_i) is the i-th column block of Ṽ.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import check_size, resolve_tol
from .linalg import adj, as_matrix, eye, fro, lift_identity, opnorm, rank_cut, svd
from .report import CheckReport


class RepShapeError(ValueError):
    """Matrix or generator shapes do not fit the declared dimensions."""


Generator = tuple[str, np.ndarray]


def _frozen(m: np.ndarray) -> np.ndarray:
    a = np.array(m, dtype=np.complex128, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class CovariantRep:
    dim_h: int
    n: int
    v_tilde: np.ndarray
    sigma_gens: tuple[Generator, ...] | None = None
    phi_gens: tuple[Generator, ...] | None = None
    metadata: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def __repr__(self) -> str:
        return f"CovariantRep(dim_h={self.dim_h}, n={self.n})"

    @property
    def norm(self) -> float:
        if "norm" not in self._cache:
            self._cache["norm"] = opnorm(self.v_tilde)
        return self._cache["norm"]

    @property
    def scale(self) -> float:
        """Normaliser 1 + ‖Ṽ‖ for scale-free residuals."""
        return 1.0 + self.norm

    def generator(self, i: int) -> np.ndarray:
        """V_i = V(δ_i), 0-based."""
        h = self.dim_h
        return self.v_tilde[:, i * h:(i + 1) * h]

    def with_matrix(self, v_tilde) -> "CovariantRep":
        return make_rep(self.dim_h, self.n, v_tilde, self.sigma_gens, self.phi_gens, dict(self.metadata))


def _check_gens(gens, size: int, what: str) -> tuple[Generator, ...] | None:
    if gens is None:
        return None
    out = []
    for item in gens:
        label, mat = item
        a = as_matrix(mat, f"{what} generator {label!r}")
        if a.shape != (size, size):
            raise RepShapeError(f"{what} generator {label!r}: expected {size}x{size}, got {a.shape[0]}x{a.shape[1]}")
        out.append((str(label), _frozen(a)))
    return tuple(out)


def make_rep(dim_h: int, n: int, v_tilde, sigma_gens=None, phi_gens=None, metadata=None) -> CovariantRep:
    """Validate shapes and build an immutable representation."""
    if int(dim_h) != dim_h or dim_h < 1:
        raise RepShapeError(f"dim_h must be a positive integer, got {dim_h!r}")
    if int(n) != n or n < 1:
        raise RepShapeError(f"n must be a positive integer, got {n!r}")
    dim_h, n = int(dim_h), int(n)
    v = as_matrix(v_tilde, "v_tilde")
    if v.shape != (dim_h, n * dim_h):
        raise RepShapeError(
            f"v_tilde: expected {dim_h}x{n * dim_h} (dim_h x n*dim_h), got {v.shape[0]}x{v.shape[1]}"
        )
    sig = _check_gens(sigma_gens, dim_h, "sigma")
    phi = _check_gens(phi_gens, n, "phi")
    if (sig is None) != (phi is None):
        raise RepShapeError("sigma_gens and phi_gens must be given together")
    if sig is not None:
        if [s[0] for s in sig] != [p[0] for p in phi]:
            raise RepShapeError("sigma_gens and phi_gens labels must match in order")
    return CovariantRep(dim_h, n, _frozen(v), sig, phi, dict(metadata or {}))


def from_generators(mats: Sequence, **kw) -> CovariantRep:
    """Ṽ = [V_1 | … | V_n] from square matrices V_i on H."""
    mats = [as_matrix(m) for m in mats]
    if not mats:
        raise RepShapeError("need at least one generator")
    h = mats[0].shape[0]
    return make_rep(h, len(mats), np.hstack(mats), **kw)


def zero_rep(dim_h: int, n: int) -> CovariantRep:
    return make_rep(dim_h, n, np.zeros((dim_h, n * dim_h)))


def direct_sum(a: CovariantRep, b: CovariantRep) -> CovariantRep:
    """Representation on H_a ⊕ H_b acting generator-wise block-diagonally."""
    if a.n != b.n:
        raise RepShapeError(f"direct sum needs equal n, got {a.n} and {b.n}")
    blocks = []
    for i in range(a.n):
        va, vb = a.generator(i), b.generator(i)
        top = np.hstack([va, np.zeros((a.dim_h, b.dim_h))])
        bot = np.hstack([np.zeros((b.dim_h, a.dim_h)), vb])
        blocks.append(np.vstack([top, bot]))
    return from_generators(blocks)


def lift(rep: CovariantRep, k: int) -> np.ndarray:
    """I_{E^k} ⊗ Ṽ as a (n^k·h) x (n^{k+1}·h) matrix."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    check_size(rep.n ** (k + 1) * rep.dim_h, f"lift k={k}")
    key = ("lift", k)
    if key not in rep._cache:
        m = rep.v_tilde if k == 0 else lift_identity(rep.n ** k, rep.v_tilde)
        rep._cache[key] = _frozen(m)
    return rep._cache[key]


def power(rep: CovariantRep, k: int) -> np.ndarray:
    """Ṽ_k : E^k ⊗ H → H, with Ṽ_0 = I and Ṽ_k = Ṽ_{k-1}(I_{E^{k-1}} ⊗ Ṽ)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    check_size(rep.n ** k * rep.dim_h, f"power k={k}")
    key = ("power", k)
    if key not in rep._cache:
        if k == 0:
            m = eye(rep.dim_h)
        elif k == 1:
            m = rep.v_tilde
        else:
            m = power(rep, k - 1) @ lift(rep, k - 1)
        rep._cache[key] = _frozen(m)
    return rep._cache[key]


def power_left(rep: CovariantRep, k: int) -> np.ndarray:
    """Ṽ_k through the other factorisation Ṽ(I_E ⊗ Ṽ_{k-1}); an independent route."""
    if k == 0:
        return eye(rep.dim_h)
    m = rep.v_tilde
    for j in range(2, k + 1):
        check_size(rep.n ** j * rep.dim_h, f"power k={j}")
        m = rep.v_tilde @ lift_identity(rep.n, m)
    return m


def gamma(rep: CovariantRep, tol: float | None = None) -> float:
    """Reduced minimum modulus: smallest nonzero singular value, ∞ for Ṽ = 0."""
    s = svd(rep.v_tilde, full=False).singular_values
    if s.size == 0 or s[0] == 0:
        return float("inf")
    cut = rank_cut(rep.v_tilde.shape, float(s[0]), tol)
    nz = s[s > cut]
    return float(nz[-1]) if nz.size else float("inf")


def is_partial_isometry(rep: CovariantRep, tol: float | None = None) -> tuple[bool, float]:
    v = rep.v_tilde
    res = fro(v @ adj(v) @ v - v) / rep.scale
    return res <= resolve_tol(tol), res


def _is_hermitian(m: np.ndarray, tol: float) -> bool:
    return fro(m - adj(m)) <= tol * (1 + fro(m))


def check_covariance(rep: CovariantRep, tol: float | None = None) -> CheckReport:
    """σ(b)Ṽ = Ṽ(φ(b) ⊗ I_H), generator by generator.

    Labels beginning with ``herm:`` declare b hermitian; the images σ(b) and
    φ(b) are then required to be hermitian too.
    """
    t = resolve_tol(tol)
    rep_out = CheckReport("covariance", t)
    anchor = "covariance-condition"
    if rep.sigma_gens is None:
        rep_out.claim("covariance", anchor, 0.0, detail="B = C, scalars commute with Ṽ")
        return rep_out
    v = rep.v_tilde
    for (label, s), (_, p) in zip(rep.sigma_gens, rep.phi_gens):
        raw = fro(s @ v - v @ np.kron(p, eye(rep.dim_h)))
        rep_out.measure(f"covariance[{label}]", anchor, raw <= t * rep.scale, raw, t * rep.scale)
        if label.startswith("herm:"):
            ok = _is_hermitian(s, t) and _is_hermitian(p, t)
            rep_out.measure(f"hermitian-image[{label}]", "plumbing", ok)
    # nondegeneracy of φ: the images of the generators span E
    stacked = np.hstack([p for _, p in rep.phi_gens]) if rep.phi_gens else np.zeros((rep.n, 0))
    rank = int(np.sum(svd(stacked, full=False).singular_values > t)) if stacked.size else 0
    rep_out.measure("phi-nondegenerate", "plumbing", rank == rep.n, detail=f"rank {rank} of {rep.n}")
    return rep_out
