"""Moore-Penrose inverse, Cauchy dual and dagger powers of a representation.

The Cauchy dual is computed as the adjoint of the pseudoinverse; the defining
product Ṽ(Ṽ*Ṽ)† is kept as an independent cross-check.
"""
from __future__ import annotations

import numpy as np

from .config import SizeCapError, check_size, get_settings, resolve_tol
from .linalg import (
    DimensionError, Subspace, adj, as_matrix, coimage, default_rank_tol, equality_residual, eye, fro, image,
    leq_residual, lift_identity, onb_kernel, onb_range, opnorm, pinv, projector, rank_cut,
    subspace_intersect, svd, tensor_leq_residual, tensor_subspace,
)
from .model import CovariantRep, is_partial_isometry, make_rep, power
from .report import CheckReport


def lab_pinv(m, tol: float | None = None) -> np.ndarray:
    """Pseudoinverse with the lab rank cutoff (see :func:`linalg.rank_cut`)."""
    a = as_matrix(m)
    if a.size == 0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=np.complex128)
    s = svd(a, full=False).singular_values
    return pinv(a, rank_tol=rank_cut(a.shape, float(s[0]), tol))


def mp_inverse(rep: CovariantRep, tol: float | None = None) -> np.ndarray:
    key = ("pinv", resolve_tol(tol))
    if key not in rep._cache:
        w = lab_pinv(rep.v_tilde, tol)
        w.flags.writeable = False
        rep._cache[key] = w
    return rep._cache[key]


def dagger_power(rep: CovariantRep, k: int, tol: float | None = None) -> np.ndarray:
    """Ṽ^{†(k)} = (I_{E^{k-1}}⊗Ṽ†)…(I_E⊗Ṽ†)Ṽ†, shape n^k·h x h."""
    if k < 1:
        raise ValueError("dagger_power needs k >= 1")
    check_size(rep.n ** k * rep.dim_h, f"dagger power k={k}")
    key = ("dagger", k, resolve_tol(tol))
    if key not in rep._cache:
        w = mp_inverse(rep, tol)
        m = w if k == 1 else lift_identity(rep.n ** (k - 1), w) @ dagger_power(rep, k - 1, tol)
        rep._cache[key] = m
    return rep._cache[key]


def cauchy_dual(rep: CovariantRep, tol: float | None = None) -> CovariantRep:
    """Ṽ' = (Ṽ†)*; shift bookkeeping is kept, the weight echo is not."""
    meta = {k: v for k, v in rep.metadata.items() if k != "weights"}
    return make_rep(rep.dim_h, rep.n, adj(mp_inverse(rep, tol)), rep.sigma_gens, rep.phi_gens, meta)


def dual_by_definition(rep: CovariantRep, tol: float | None = None) -> np.ndarray:
    """Ṽ(Ṽ*Ṽ)†, the defining formula, with a cutoff matched to the squared spectrum."""
    v = rep.v_tilde
    g = adj(v) @ v
    s = svd(v, full=False).singular_values
    if s.size == 0 or s[0] == 0:
        return np.zeros_like(v)
    cut_v = rank_cut(v.shape, float(s[0]), tol)
    keep = s[s > cut_v]
    # place the Gram cutoff halfway (geometrically) between kept and dropped squares
    lo = float(keep[-1]) ** 2
    hi_drop = s[s <= cut_v]
    top = float(hi_drop[0]) ** 2 if hi_drop.size else 0.0
    cut = np.sqrt(lo * max(top, np.finfo(float).tiny)) if top > 0 else 0.5 * lo
    # never below the rounding floor of the Gram matrix itself
    cut = min(0.5 * lo, max(cut, default_rank_tol(g.shape, float(s[0]) ** 2)))
    return v @ pinv(g, rank_tol=cut)


def matrix_dual(m, tol: float | None = None) -> np.ndarray:
    """Cauchy dual of a bare matrix: pinv(M)*."""
    return adj(lab_pinv(m, tol))


def penrose_residuals(v, w) -> tuple[float, float, float, float]:
    v = as_matrix(v, "V")
    w = as_matrix(w, "W")
    if w.shape != (v.shape[1], v.shape[0]):
        raise DimensionError(f"W must have shape {v.shape[1]}x{v.shape[0]}, got {w.shape[0]}x{w.shape[1]}")
    vw = v @ w
    wv = w @ v
    return (
        fro(vw @ v - v),
        fro(wv @ w - w),
        fro(adj(vw) - vw),
        fro(adj(wv) - wv),
    )


def composite_inverse(rep: CovariantRep, s: np.ndarray, k: int) -> np.ndarray:
    """S^{(k)} = (I_{E^{k-1}}⊗S)…(I_E⊗S)S; S^{(0)} = I."""
    if k == 0:
        return eye(rep.dim_h)
    check_size(rep.n ** k * rep.dim_h, f"S^(k) k={k}")
    m = s
    for j in range(2, k + 1):
        m = lift_identity(rep.n ** (j - 1), s) @ m
    return m


def random_generalized_inverse(rep: CovariantRep, rng: np.random.Generator, tol: float | None = None) -> np.ndarray:
    """A random reflexive generalized inverse (SṼS = S, ṼSṼ = Ṽ).

    S = G1 Ṽ G2 with G1 = Ṽ† + (I − Ṽ†Ṽ)Y and G2 = Ṽ† + Z(I − ṼṼ†).
    """
    v = rep.v_tilde
    w = mp_inverse(rep, tol)
    h, c = v.shape
    y = rng.standard_normal((c, h)) + 1j * rng.standard_normal((c, h))
    z = rng.standard_normal((c, h)) + 1j * rng.standard_normal((c, h))
    g1 = w + (eye(c) - w @ v) @ y
    g2 = w + z @ (eye(h) - v @ w)
    return g1 @ v @ g2


def _fixed_space(a: np.ndarray, b: np.ndarray, tol: float) -> Subspace:
    """N(AB − I); rank is judged against the rounding scale ‖A‖‖B‖, never below ‖I‖."""
    d = a @ b - eye(a.shape[0])
    return onb_kernel(d, rank_tol=rank_cut(d.shape, max(1.0, opnorm(a) * opnorm(b)), tol), tol=tol)


def _subspace_eq_residual(a: Subspace, b: Subspace) -> float:
    if a.dim != b.dim:
        return float("inf")
    return equality_residual(a, b)


def verify_generalized_inverse(rep: CovariantRep, s, k_max: int | None = None,
                               tol: float | None = None) -> CheckReport:
    from .structure import generalized_range, is_regular

    t = resolve_tol(tol)
    s = as_matrix(s, "S")
    h, n = rep.dim_h, rep.n
    if s.shape != (n * h, h):
        raise DimensionError(f"S must have shape {n * h}x{h}, got {s.shape[0]}x{s.shape[1]}")
    k_max = get_settings().k_max if k_max is None else k_max
    out = CheckReport("generalized-inverse", t)
    v = rep.v_tilde
    scale = rep.scale * (1 + opnorm(s))
    r1 = fro(s @ v @ s - s) / scale
    r2 = fro(v @ s @ v - v) / scale
    ginv = r1 <= t and r2 <= t
    out.measure("g-inverse:SVS=S", "generalized-inverse-def", r1 <= t, r1)
    out.measure("g-inverse:VSV=V", "generalized-inverse-def", r2 <= t, r2)

    reg = is_regular(rep, k_max=k_max, tol=t)
    regular = reg.get("regular").passed
    rinf, _ = generalized_range(rep, k_max, t)
    kern = onb_kernel(v, tol=t)
    ran = onb_range(v, tol=t)

    # (I_E ⊗ S) N(Ṽ) ⊆ E^2 ⊗ R^∞
    def contained(k: int, target: Subspace) -> tuple[bool, float]:
        img = image(lift_identity(n, composite_inverse(rep, s, k)), kern, tol=t)
        res = tensor_leq_residual(img, n ** (k + 1), target)
        return res <= t * (1 + img.dim), res

    ok, res = contained(1, rinf)
    out.implication("ginv-kernel-into-gen-range", "ginv-kernel-containment",
                    regular and ginv, ok, res)

    # three-way equivalence: regular vs (ii)_k for all k vs (iii)_k for all k
    k_top = k_max
    try:
        all_ii, all_iii = True, True
        for k in range(0, k_top + 1):
            ok2, r_ii = contained(k, rinf)
            ok3, r_iii = contained(k, ran)
            out.measure(f"ginv-chain-gen-range[k={k}]", "ginv-regularity-equivalence", ok2, r_ii)
            out.measure(f"ginv-chain-range[k={k}]", "ginv-regularity-equivalence", ok3, r_iii)
            all_ii &= ok2
            all_iii &= ok3
        agree = regular == all_ii == all_iii
        out.implication("ginv-regularity-equivalence", "ginv-regularity-equivalence", ginv, agree,
                        detail=f"regular={regular} (ii)={all_ii} (iii)={all_iii}, k<={k_top}")
    except SizeCapError as exc:
        out.skip("ginv-regularity-equivalence", "ginv-regularity-equivalence", str(exc))

    # consequences for regular reps with a generalized inverse
    if rinf.dim:
        img = image(v, tensor_subspace(n, rinf), tol=t)
        res_ii = _subspace_eq_residual(img, rinf)
        img3 = image(s, rinf, tol=t)
        res_iii = leq_residual(img3, tensor_subspace(n, rinf))
    else:
        res_ii, res_iii = 0.0, 0.0
    out.implication("regular:V(E*Rinf)=Rinf", "regular-range-invariance", regular, res_ii <= t, res_ii)
    out.implication("regular:S(Rinf)<=E*Rinf", "regular-ginv-invariance", regular and ginv,
                    res_iii <= t * (1 + rinf.dim), res_iii)
    for k in range(1, k_max + 1):
        try:
            vk = power(rep, k)
            sk = composite_inverse(rep, s, k)
        except SizeCapError:
            break
        res = fro(vk @ sk @ vk - vk) / ((1 + opnorm(vk)) * (1 + opnorm(sk)) * (1 + opnorm(vk)))
        out.implication(f"regular:VkS(k)Vk=Vk[k={k}]", "regular-power-ginv", regular and ginv, res <= t, res)
    return out


def _unitary(m, tol: float) -> np.ndarray:
    u = as_matrix(m, "U")
    if u.shape[0] != u.shape[1]:
        raise ValueError("U must be square")
    res = fro(adj(u) @ u - eye(u.shape[0]))
    if res > max(tol, 1e-12) * u.shape[0] * 10:
        raise ValueError(f"U is not unitary: ‖U*U − I‖ = {res:.3e}")
    return u


def default_unitary(dim: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def dual_identity_suite(rep: CovariantRep, u=None, tol: float | None = None,
                        k_max: int | None = None) -> CheckReport:
    """Every Cauchy-dual and Moore-Penrose identity, one claim per line."""
    from .structure import is_regular

    t = resolve_tol(tol)
    k_max = get_settings().k_max if k_max is None else k_max
    out = CheckReport("duality", t)
    v = rep.v_tilde
    h, n = rep.dim_h, rep.n
    sc = rep.scale
    w = mp_inverse(rep, t)
    vp = adj(w)
    dual = cauchy_dual(rep, t)
    ns = 1 + opnorm(w)

    # Cauchy dual identities
    out.claim("dual:V'=V(V*V)+", "cauchy-dual-formula", fro(vp - dual_by_definition(rep, t)) / ns)
    out.claim("dual:V'=(V*)+", "cauchy-dual-formula", fro(vp - lab_pinv(adj(v), t)) / ns)
    out.claim("dual:V''=V", "cauchy-dual-involution", fro(adj(mp_inverse(dual, t)) - v) / sc)
    vstar_dual = matrix_dual(adj(v), t)
    out.claim("dual:(V*)'=(V')*", "cauchy-dual-adjoint", fro(vstar_dual - adj(vp)) / ns)
    g = adj(v) @ v
    out.claim("dual:V'*V'=(V*V)'", "cauchy-dual-gram", fro(adj(vp) @ vp - matrix_dual(g, t)) / (ns * ns))
    pi, _ = is_partial_isometry(rep, t)
    self_dual = fro(vp - v) / sc <= t
    out.claim("dual:V'=V<=>partial-isometry", "cauchy-dual-partial-isometry",
              0.0 if pi == self_dual else 1.0, detail=f"partial_isometry={pi} self_dual={self_dual}")
    coim = coimage(v, tol=t)
    ran = onb_range(v, tol=t)
    p_coim = projector(coim)
    p_ran = projector(ran)
    out.claim("dual:V*V'=P_N(V)perp", "cauchy-dual-projections", fro(adj(v) @ vp - p_coim))
    out.claim("dual:(V*)'V=P_N(V)perp", "cauchy-dual-projections", fro(vstar_dual @ v - p_coim))
    out.claim("dual:V'V*=P_R(V)", "cauchy-dual-projections", fro(vp @ adj(v) - p_ran))
    out.claim("dual:V(V*)'=P_R(V)", "cauchy-dual-projections", fro(v @ vstar_dual - p_ran))

    # Moore-Penrose properties
    pr = penrose_residuals(v, w)
    out.claim("mp:penrose", "moore-penrose-equations", max(pr) / (sc * ns))
    kern = onb_kernel(v, tol=t)
    out.claim("mp:R(V+)=R(V*)", "moore-penrose-properties", _subspace_eq_residual(onb_range(w, tol=t), coim))
    out.claim("mp:R(V*)=N(V)perp", "moore-penrose-properties",
              0.0 if coim.dim + kern.dim == n * h else 1.0,
              detail=f"rank {coim.dim} + nullity {kern.dim}")
    out.claim("mp:VV+=P_R(V)", "moore-penrose-properties", fro(v @ w - p_ran))
    out.claim("mp:V+V=P_R(V*)", "moore-penrose-properties", fro(w @ v - p_coim))
    ker_star = onb_kernel(adj(v), tol=t)
    out.claim("mp:N(V+)=N(V*)", "moore-penrose-properties", _subspace_eq_residual(onb_kernel(w, tol=t), ker_star))
    out.claim("mp:N(VV+)=N(V*)", "moore-penrose-properties", _subspace_eq_residual(onb_kernel(v @ w, tol=t), ker_star))
    out.claim("mp:R(V)=R(VV+)", "moore-penrose-properties", _subspace_eq_residual(onb_range(v @ w, tol=t), ran))
    out.claim("mp:R(V)=R(V+*)", "moore-penrose-properties", _subspace_eq_residual(onb_range(vp, tol=t), ran))
    out.claim("mp:N(V)=N(V+V)", "moore-penrose-properties", _subspace_eq_residual(onb_kernel(w @ v, tol=t), kern))
    out.claim("mp:N(V)=N(V+*)", "moore-penrose-properties", _subspace_eq_residual(onb_kernel(vp, tol=t), kern))
    out.claim("mp:V*VV+=V*", "moore-penrose-properties", fro(adj(v) @ v @ w - adj(v)) / sc)
    out.claim("mp:V+VV*=V*", "moore-penrose-properties", fro(w @ v @ adj(v) - adj(v)) / sc)
    out.claim("mp:(V+)+=V", "moore-penrose-properties", fro(lab_pinv(w, t) - v) / sc)
    out.claim("mp:(V*)+=(V+)*", "moore-penrose-properties", fro(lab_pinv(adj(v), t) - vp) / ns)
    out.claim("mp:(V*V)+=V+(V*)+", "gram-pinv-factorization", fro(lab_pinv(g, t) - w @ adj(w)) / (ns * ns))

    # identities that need regularity
    regular = is_regular(rep, k_max=k_max, tol=t).get("regular").passed
    for k in range(1, k_max + 1):
        try:
            vk = power(rep, k)
            dk = dagger_power(rep, k, t)
        except SizeCapError:
            break
        if not regular:
            out.skip(f"regular:N(V+(k))^R(Vk)=0[k={k}]", "dagger-power-range",
                     "representation is not regular")
            out.skip(f"regular:R(Vk)=Fix(VkV+(k))[k={k}]", "dagger-power-range",
                     "representation is not regular")
            continue
        rk = onb_range(vk, tol=t)
        inter = subspace_intersect(onb_kernel(dk, tol=t), rk)
        out.claim(f"regular:N(V+(k))^R(Vk)=0[k={k}]", "dagger-power-range", float(inter.dim))
        fixed = _fixed_space(vk, dk, t)
        out.claim(f"regular:R(Vk)=Fix(VkV+(k))[k={k}]", "dagger-power-range", _subspace_eq_residual(fixed, rk))

    # unitary conjugation
    uu = default_unitary(h) if u is None else _unitary(u, t)
    lifted = np.kron(eye(n), uu)
    conj = adj(uu) @ v @ lifted
    lhs = matrix_dual(conj, t)
    rhs = adj(uu) @ vp @ lifted
    out.claim("dual:unitary-conjugation", "cauchy-dual-unitary-conjugation", fro(lhs - rhs) / ns)
    return out


def exploratory_dagger_range(rep: CovariantRep, k: int, tol: float | None = None) -> tuple[int, float]:
    """dim N(Ṽ^{†(k)}) ∩ R(Ṽ_k) and the fixed-point residual, for any rep.

    Only asserted for regular representations; for the others this is a
    measurement, not a claim.
    """
    t = resolve_tol(tol)
    vk = power(rep, k)
    dk = dagger_power(rep, k, t)
    rk = onb_range(vk, tol=t)
    inter = subspace_intersect(onb_kernel(dk, tol=t), rk)
    fixed = _fixed_space(vk, dk, t)
    return inter.dim, _subspace_eq_residual(fixed, rk)


def n_dagger_residual(rep: CovariantRep, k: int, tol: float | None = None) -> float:
    if k < 2:
        raise ValueError("n-dagger is defined for k >= 2")
    dk = dagger_power(rep, k, tol)
    pk = lab_pinv(power(rep, k), tol)
    return fro(dk - pk) / (1 + opnorm(pk))


def is_n_dagger(rep: CovariantRep, k: int, tol: float | None = None) -> tuple[bool, float]:
    res = n_dagger_residual(rep, k, tol)
    return res <= resolve_tol(tol), res


def is_hyper_dagger(rep: CovariantRep, k_max: int | None = None,
                    tol: float | None = None) -> tuple[bool, dict[int, float]]:
    """n-dagger for every 2 ≤ k ≤ k_max (stopping early at the size cap)."""
    k_max = get_settings().k_max if k_max is None else k_max
    t = resolve_tol(tol)
    profile: dict[int, float] = {}
    for k in range(2, k_max + 1):
        try:
            profile[k] = n_dagger_residual(rep, k, t)
        except SizeCapError:
            break
    return all(r <= t for r in profile.values()), profile
