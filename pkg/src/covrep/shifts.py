"""Truncated weighted shifts, their closed forms, and the random fuzz source.

The shift sends δ_i ⊗ e_m to w_{i,m} e_{nm+i} (i = 1..n). On a finite window
an image that leaves the window is dropped, so the truncated matrix agrees
with the infinite shift only on "exact" indices; those are computed here and
stored in the representation metadata.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import check_size
from .linalg import adj, eye
from .model import CovariantRep, make_rep

KINDS = ("unilateral", "bilateral")
RANDOM_KINDS = ("dense", "rank-deficient", "left-invertible", "partial-isometry", "concave-shift")


@dataclass(frozen=True)
class WeightedShiftSpec:
    kind: str
    n: int
    window: tuple[int, int]
    weights: np.ndarray  # shape (n, hi - lo + 1); row i-1 holds w_{i,m}

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        lo, hi = (int(x) for x in self.window)
        if hi < lo:
            raise ValueError(f"empty window {lo}..{hi}")
        if self.kind == "unilateral" and lo < 0:
            raise ValueError("unilateral windows start at m >= 0")
        w = np.asarray(self.weights)
        if np.iscomplexobj(w):
            if np.any(np.imag(w) != 0):
                raise ValueError("weights must be real")
            w = np.real(w)
        w = np.array(w, dtype=float)
        if w.shape != (self.n, hi - lo + 1):
            raise ValueError(f"weights: expected shape ({self.n}, {hi - lo + 1}), got {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        w.flags.writeable = False
        object.__setattr__(self, "window", (lo, hi))
        object.__setattr__(self, "weights", w)

    @property
    def indices(self) -> range:
        return range(self.window[0], self.window[1] + 1)

    @property
    def size(self) -> int:
        return self.window[1] - self.window[0] + 1

    def weight(self, i: int, m: int) -> float:
        """w_{i,m} with 1-based i."""
        return float(self.weights[i - 1, m - self.window[0]])

    def inside(self, m: int) -> bool:
        return self.window[0] <= m <= self.window[1]

    def target(self, i: int, m: int) -> int:
        return self.n * m + i

    def preimage(self, m: int) -> tuple[int, int] | None:
        """(m', i) with n·m' + i = m in the untruncated shift, if any."""
        mp = (m - 1) // self.n
        if self.kind == "unilateral" and mp < 0:
            return None
        return mp, m - self.n * mp

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "window": list(self.window)}


def unit_spec(kind: str, n: int, window: tuple[int, int]) -> WeightedShiftSpec:
    lo, hi = window
    return WeightedShiftSpec(kind, n, window, np.ones((n, hi - lo + 1)))


def dirichlet_weights(n: int, window: tuple[int, int]) -> np.ndarray:
    """w_m = sqrt((|m|+2)/(|m|+1)), the same for every i."""
    ms = np.abs(np.arange(window[0], window[1] + 1))
    return np.tile(np.sqrt((ms + 2.0) / (ms + 1.0)), (n, 1))


def dirichlet_spec(kind: str, n: int, window: tuple[int, int]) -> WeightedShiftSpec:
    return WeightedShiftSpec(kind, n, window, dirichlet_weights(n, window))


def zero_at(spec: WeightedShiftSpec, m0: int) -> WeightedShiftSpec:
    """Copy of ``spec`` with w_{i,m0} = 0 for every i."""
    if not spec.inside(m0):
        raise ValueError(f"m0={m0} is outside the window {spec.window[0]}..{spec.window[1]}")
    w = np.array(spec.weights)
    w[:, m0 - spec.window[0]] = 0.0
    return WeightedShiftSpec(spec.kind, spec.n, spec.window, w)


def forward_exact(spec: WeightedShiftSpec, steps: int) -> list[int]:
    """Indices m all of whose paths of length ``steps`` stay inside the window."""
    prev = set(spec.indices)
    for _ in range(steps):
        prev = {m for m in spec.indices if all(spec.target(i, m) in prev for i in range(1, spec.n + 1))}
    return sorted(prev)


def exact_indices(spec: WeightedShiftSpec, steps: int = 1, backward: bool = False) -> list[int]:
    """Indices where a ``steps``-fold product is exact.

    With ``backward`` the untruncated preimage of m, if there is one, must
    also lie in the window and be (steps+1)-fold exact, which is what terms
    such as Ṽ* e_m need.
    """
    fwd = forward_exact(spec, steps)
    if not backward:
        return fwd
    deeper = set(forward_exact(spec, steps + 1))
    out = []
    for m in fwd:
        pre = spec.preimage(m)
        if pre is None or pre[0] in deeper:
            out.append(m)
    return out


@dataclass
class ShiftRealization:
    rep: CovariantRep
    spec: WeightedShiftSpec
    index_map: dict[int, int]
    interior: list[int] = field(default_factory=list)

    def coords(self, ms: Sequence[int]) -> list[int]:
        return [self.index_map[m] for m in ms]


def _shift_matrix(spec: WeightedShiftSpec) -> np.ndarray:
    h, lo = spec.size, spec.window[0]
    v = np.zeros((h, spec.n * h), dtype=np.complex128)
    for i in range(1, spec.n + 1):
        for m in spec.indices:
            t = spec.target(i, m)
            if spec.inside(t):
                v[t - lo, (i - 1) * h + (m - lo)] = spec.weight(i, m)
    return v


def build_shift(spec: WeightedShiftSpec) -> ShiftRealization:
    h = spec.size
    check_size(spec.n * h, "shift window")
    interior = exact_indices(spec, 1)
    meta = {"shift": spec.to_json(), "weights": spec.weights.tolist(), "interior": interior}
    rep = make_rep(h, spec.n, _shift_matrix(spec),
                   sigma_gens=[("herm:1", eye(h))], phi_gens=[("herm:1", eye(spec.n))], metadata=meta)
    index_map = {m: m - spec.window[0] for m in spec.indices}
    return ShiftRealization(rep, spec, index_map, interior)


def spec_from_metadata(rep: CovariantRep) -> WeightedShiftSpec | None:
    """Rebuild the index bookkeeping of a shift; weights are not needed for it."""
    info = rep.metadata.get("shift")
    if not info:
        return None
    lo, hi = info["window"]
    return unit_spec(info["kind"], int(info["n"]), (int(lo), int(hi)))


def interior_coordinates(rep: CovariantRep, steps: int = 1, backward: bool = False) -> list[int] | None:
    """H-coordinates of exact indices, or None for a representation that is not a shift."""
    spec = spec_from_metadata(rep)
    if spec is None:
        return None
    lo = spec.window[0]
    return [m - lo for m in exact_indices(spec, steps, backward)]


def interior_columns(spec: WeightedShiftSpec) -> list[int]:
    """Columns δ_i ⊗ e_m of Ṽ whose source m is exact."""
    h, lo = spec.size, spec.window[0]
    ms = exact_indices(spec, 1)
    return [(i - 1) * h + (m - lo) for i in range(1, spec.n + 1) for m in ms]


@dataclass
class WeightRow:
    i: int
    m: int
    target: int
    margin: float
    included: bool


@dataclass
class WeightScan:
    rows: list[WeightRow]
    passed: bool
    max_margin: float


def weight_scan(spec: WeightedShiftSpec, tol: float = 1e-10, interior: bool = True) -> WeightScan:
    """w_{i,m}² w_{i,nm+i}² − 2w_{i,m}² + 1 per generator, over evaluable pairs.

    Zero-weight positions are reported but excluded from the verdict. With
    ``interior`` only indices whose two-step image stays in the window are
    scanned, so that the table matches the truncated matrix.
    """
    allowed = set(exact_indices(spec, 2)) if interior else None
    rows = []
    for i in range(1, spec.n + 1):
        for m in spec.indices:
            t = spec.target(i, m)
            if not spec.inside(t) or (allowed is not None and m not in allowed):
                continue
            w, w2 = spec.weight(i, m), spec.weight(i, t)
            rows.append(WeightRow(i, m, t, w * w * w2 * w2 - 2 * w * w + 1, w != 0))
    live = [r.margin for r in rows if r.included]
    worst = max(live, default=-np.inf)
    return WeightScan(rows, worst <= tol, float(worst))


def shift_dual_closed_form(spec: WeightedShiftSpec) -> np.ndarray:
    """Ṽ' from V_i'(e_m) = (1/w_{i,m}) e_{nm+i} (0 at zero weights) on exact columns."""
    if not np.any(spec.weights):
        raise ValueError("degenerate shift: every weight is zero")
    h, lo = spec.size, spec.window[0]
    out = np.zeros((h, spec.n * h), dtype=np.complex128)
    for i in range(1, spec.n + 1):
        for m in exact_indices(spec, 1):
            w = spec.weight(i, m)
            if w != 0:
                out[spec.target(i, m) - lo, (i - 1) * h + (m - lo)] = 1.0 / w
    return out


def shift_dagger_closed_form(spec: WeightedShiftSpec) -> np.ndarray:
    """Ṽ† from V_i†(e_j) = (1/w_{i,m}) e_m when j = nm+i, assembled row-block-wise."""
    h, lo = spec.size, spec.window[0]
    out = np.zeros((spec.n * h, h), dtype=np.complex128)
    for i in range(1, spec.n + 1):
        for m in spec.indices:
            t = spec.target(i, m)
            w = spec.weight(i, m)
            if spec.inside(t) and w != 0:
                out[(i - 1) * h + (m - lo), t - lo] = 1.0 / w
    return out


def make_rng(seed: int, trial: int = 0, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, trial, stream); platform independent."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial), int(stream)])))


def _unitary(rng: np.random.Generator, k: int) -> np.ndarray:
    z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.where(np.abs(d) == 0, 1, np.abs(d)))


def _concave_weights(rng: np.random.Generator, n: int, size: int, p_zero: float = 0.15) -> np.ndarray:
    """Squared weights c with c_{a,nm+b} ≤ 2 − 1/c_{b,m}, plus scattered zeros.

    Indices are visited in increasing order; a target's preimage is always
    smaller, so its weight is already known.
    """
    c = np.zeros((n, size))
    for j in range(size):
        pre = None if j == 0 else ((j - 1) // n, j - n * ((j - 1) // n))
        for a in range(n):
            if pre is None or c[pre[1] - 1, pre[0]] == 0:
                val = rng.uniform(1.0, 3.0)
            else:
                parent = c[pre[1] - 1, pre[0]]
                val = 1.0 + rng.uniform(0.5, 1.0) * (1.0 - 1.0 / parent)
            c[a, j] = 0.0 if rng.random() < p_zero else val
    return np.sqrt(c)


def random_rep(seed: int, dim_h: int, n: int, kind: str = "dense", trial: int = 0) -> CovariantRep:
    """Deterministic random representation of the given kind."""
    if kind not in RANDOM_KINDS:
        raise ValueError(f"kind must be one of {RANDOM_KINDS}, got {kind!r}")
    if dim_h < 1 or n < 1:
        raise ValueError("dim_h and n must be positive")
    check_size(n * dim_h, "random representation")
    rng = make_rng(seed, trial)
    h, cols = dim_h, n * dim_h
    meta = {"random": {"seed": int(seed), "trial": int(trial), "kind": kind}}
    if kind == "dense":
        v = (rng.standard_normal((h, cols)) + 1j * rng.standard_normal((h, cols))) / np.sqrt(cols)
        return make_rep(h, n, v, metadata=meta)
    if kind == "concave-shift":
        w = _concave_weights(rng, n, h)
        real = build_shift(WeightedShiftSpec("unilateral", n, (0, h - 1), w))
        real.rep.metadata.update(meta)
        return real.rep
    if kind == "left-invertible" and n != 1:
        raise ValueError("left-invertible representations need n = 1 (Ṽ maps C^{n h} into C^h)")
    u, w = _unitary(rng, h), _unitary(rng, cols)
    if kind == "left-invertible":
        r = h
    elif kind == "rank-deficient":
        # with n ≥ 2 the kernel is nontrivial at any rank; with n = 1 drop at least one
        r = int(rng.integers(0, h)) if n == 1 else int(rng.integers(0, h + 1))
    else:
        r = int(rng.integers(0, h + 1))
    if kind == "partial-isometry":
        s = np.ones(r)
    else:
        s = rng.uniform(0.25, 3.0, size=r)
    v = (u[:, :r] * s) @ adj(w[:, :r])
    return make_rep(h, n, v, metadata=meta)
