"""Range chains, regularity, wandering subspaces and Wold-type decompositions.

Every subspace here is built iteratively: R(Ṽ_{k+1}) = Ṽ(E ⊗ R(Ṽ_k)) and
Ṽ_{k+1}(E^{k+1} ⊗ S) = Ṽ(E ⊗ Ṽ_k(E^k ⊗ S)), so no tensor power of H larger
than E ⊗ H is formed unless a statement is literally about Ṽ_k.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SizeCapError, get_settings, resolve_tol
from .duality import cauchy_dual, dagger_power, is_hyper_dagger, lab_pinv, mp_inverse
from .linalg import (
    Subspace, adj, coimage, complement, equality_residual, eye, fro, image, leq_residual,
    lift_identity, onb_kernel, onb_range, opnorm, orthogonality_residual, projector, rank_cut,
    subspace_equal, subspace_intersect, subspace_join, tensor_subspace,
)
from .model import CovariantRep, power
from .report import CheckReport

CAP_HIT = "cap-hit"


def _kmax(k_max: int | None) -> int:
    k = get_settings().k_max if k_max is None else int(k_max)
    if k < 1:
        raise ValueError("k_max must be >= 1")
    return k


def range_chain(rep: CovariantRep, k_max: int | None = None, tol: float | None = None) -> list[Subspace]:
    """[R(Ṽ_0), R(Ṽ_1), …] up to stabilisation plus one confirming step, or k_max."""
    t = resolve_tol(tol)
    k_max = _kmax(k_max)
    key = ("chain", k_max, t)
    if key in rep._cache:
        return rep._cache[key]
    chain = [Subspace.full(rep.dim_h, t)]
    for _ in range(k_max + 1):
        nxt = image(rep.v_tilde, tensor_subspace(rep.n, chain[-1]), tol=t)
        chain.append(nxt)
        if nxt.dim == chain[-2].dim:
            break
    rep._cache[key] = chain
    return chain


def generalized_range(rep: CovariantRep, k_max: int | None = None,
                      tol: float | None = None) -> tuple[Subspace, int | str]:
    """R^∞(Ṽ) = ∩_k R(Ṽ_k) and the index at which the chain stabilised.

    The ranges are nested, so the intersection is the last term once two
    consecutive ranges coincide. The index reported is the first k with
    R(Ṽ_k) = R(Ṽ_{k+1}), but at least 1.
    """
    chain = range_chain(rep, k_max, tol)
    if len(chain) >= 2 and chain[-1].dim == chain[-2].dim:
        return chain[-1], max(1, len(chain) - 2)
    return chain[-1], CAP_HIT


def wandering_subspace(rep: CovariantRep, tol: float | None = None) -> Subspace:
    """𝓔 = H ⊖ Ṽ(E ⊗ H)."""
    t = resolve_tol(tol)
    return onb_kernel(adj(rep.v_tilde), tol=t)


def wandering_projector_residual(rep: CovariantRep, tol: float | None = None) -> float:
    """‖P_𝓔 − (I − ṼṼ†)‖, comparing the SVD basis with the pseudoinverse route."""
    e = wandering_subspace(rep, tol)
    return fro(projector(e) - (eye(rep.dim_h) - rep.v_tilde @ mp_inverse(rep, tol)))


@dataclass
class Brackets:
    span: Subspace
    join_dims: list[int]
    image_dims: list[int]
    stabilized_at: int | str


def brackets(rep: CovariantRep, seed: Subspace, k_max: int | None = None,
             tol: float | None = None) -> Brackets:
    """[S]_Ṽ = ⋁_{k≥0} Ṽ_k(E^k ⊗ S), truncated at k_max.

    J_{k+1} = S ∨ Ṽ(E ⊗ J_k) is increasing, and J_{k+1} = J_k forces every
    later term to agree, so the first repeat is a genuine fixed point.
    """
    t = resolve_tol(tol)
    k_max = _kmax(k_max)
    if seed.ambient != rep.dim_h:
        raise ValueError(f"seed lives in C^{seed.ambient}, H is C^{rep.dim_h}")
    joins = [seed]
    images = [seed]
    stab: int | str = CAP_HIT
    for k in range(k_max + 1):
        img = image(rep.v_tilde, tensor_subspace(rep.n, images[-1]), tol=t)
        nxt = subspace_join([seed, image(rep.v_tilde, tensor_subspace(rep.n, joins[-1]), tol=t)])
        images.append(img)
        joins.append(nxt)
        if nxt.dim == joins[-2].dim:
            stab = k
            break
    return Brackets(joins[-1], [j.dim for j in joins], [i.dim for i in images], stab)


def reduces_residual(rep: CovariantRep, m: Subspace, tol: float | None = None) -> float:
    t = resolve_tol(tol)
    if m.ambient != rep.dim_h:
        from .linalg import DimensionError
        raise DimensionError(f"subspace ambient {m.ambient} differs from dim_h {rep.dim_h}")
    mc = complement(m)
    res = 0.0
    for sub in (m, mc):
        if sub.dim:
            res = max(res, leq_residual(image(rep.v_tilde, tensor_subspace(rep.n, sub), tol=t), sub))
    if rep.sigma_gens:
        for _, s in rep.sigma_gens:
            if m.dim:
                res = max(res, leq_residual(image(s, m, tol=t), m))
    return res


def reduces(rep: CovariantRep, m: Subspace, tol: float | None = None) -> bool:
    """M and M^⊥ both invariant under every V(ξ) (and σ-invariant when given)."""
    t = resolve_tol(tol)
    return reduces_residual(rep, m, t) <= t * (1 + rep.dim_h)


def _kernel_in_tensor(coim: Subspace, count: int, r: Subspace) -> tuple[bool, float]:
    """N(A) ⊆ C^count ⊗ R, decided through E^count ⊗ R^⊥ ⊆ N(A)^⊥.

    ``coim`` is N(A)^⊥. A dimension count settles most cases without forming
    the (possibly large) complement basis.
    """
    q = complement(r)
    need = count * q.dim
    if need == 0:
        return True, 0.0
    if need > coim.dim:
        return False, 1.0
    return (res := leq_residual(tensor_subspace(count, q), coim)) <= coim.tol * (1 + need), res


@dataclass
class _Powers:
    """Lazily computed data about Ṽ_k shared by the regularity conditions."""

    rep: CovariantRep
    tol: float
    coims: dict = field(default_factory=dict)

    def coimage(self, k: int) -> Subspace:
        if k not in self.coims:
            self.coims[k] = coimage(power(self.rep, k), tol=self.tol)
        return self.coims[k]


def is_regular(rep: CovariantRep, k_max: int | None = None, tol: float | None = None,
               n_max: int | None = None, m_max: int | None = None,
               literal_cap: int = 1024) -> CheckReport:
    """Definition of regularity plus the four equivalent kernel conditions.

    Conditions (1) to (4) are evaluated on the grid 1 ≤ n ≤ n_max, 1 ≤ m ≤ m_max.
    Each is aggregated as "for every pair on the grid"; the aggregates must
    agree with each other and with the definition. Per-pair verdicts are
    informational, since a single pair need not satisfy all four at once.
    """
    t = resolve_tol(tol)
    k_max = _kmax(k_max)
    key = ("is_regular", k_max, t, n_max, m_max, literal_cap)
    if key in rep._cache:
        return rep._cache[key]
    out = CheckReport("regularity", t)
    h, ne = rep.dim_h, rep.n
    chain = range_chain(rep, k_max, t)
    rinf, stab = generalized_range(rep, k_max, t)
    kern = onb_kernel(rep.v_tilde, tol=t)
    target = tensor_subspace(ne, rinf)
    res = leq_residual(kern, target)
    regular = res <= t * (1 + kern.dim)
    out.measure("regular", "regular-def", regular, res,
                detail=f"dim N={kern.dim}, dim Rinf={rinf.dim}, stabilized_at={stab}")
    out.auto("closed-range", "regular-def")

    k_stab = len(chain) - 2 if stab != CAP_HIT else k_max
    grid = min(k_max, k_stab + 1)
    n_max = grid if n_max is None else n_max
    m_max = grid if m_max is None else m_max
    pw = _Powers(rep, t)

    def r_m(m: int) -> Subspace:
        return chain[min(m, len(chain) - 1)]

    agg = {1: True, 2: True, 3: True, 4: True}
    n_eval = 0
    via_identity = 0
    pair_disagree = 0
    cap_note = ""
    try:
        for m in range(1, m_max + 1):
            ok1, r1 = _kernel_in_tensor(pw.coimage(1), ne, r_m(m))
            out.measure(f"kcond1[m={m}]", "regularity-kernel-conditions", ok1, r1)
            agg[1] &= ok1
        for n in range(1, n_max + 1):
            coim_n = pw.coimage(n)
            ok2, r2 = _kernel_in_tensor(coim_n, ne ** n, chain[1])
            out.measure(f"kcond2[n={n}]", "regularity-kernel-conditions", ok2, r2)
            agg[2] &= ok2
            for m in range(1, m_max + 1):
                ok3, r3 = _kernel_in_tensor(coim_n, ne ** n, r_m(m))
                big = ne ** (n + m) * h
                if big <= min(literal_cap, get_settings().max_dim):
                    a = power(rep, n + m)
                    lifted = lift_identity(ne ** n, power(rep, m))
                    resid = lifted - (lifted @ lab_pinv(a, t)) @ a
                    # rank is judged against ‖I⊗Ṽ_m‖: resid is pure rounding when N(Ṽ_{n+m}) = {0}
                    img = onb_range(resid, rank_tol=rank_cut(resid.shape, opnorm(lifted), t), tol=t)
                    kn = onb_kernel(power(rep, n), tol=t)
                    r4 = equality_residual(img, kn) if img.dim == kn.dim else 1.0
                    ok4 = r4 <= t * (1 + kn.dim)
                else:
                    # (I⊗Ṽ_m)N(Ṽ_{n+m}) = N(Ṽ_n) ∩ (E^n ⊗ R(Ṽ_m)), so (4) reduces to (3)
                    ok4, r4 = ok3, r3
                    via_identity += 1
                out.measure(f"kcond3[n={n},m={m}]", "regularity-kernel-conditions", ok3, r3)
                out.measure(f"kcond4[n={n},m={m}]", "regularity-kernel-conditions", ok4, r4)
                agg[3] &= ok3
                agg[4] &= ok4
                pair_disagree += int(not (ok3 == ok4))
                n_eval += 1
    except SizeCapError as exc:
        cap_note = f"; grid truncated by size cap ({exc})"
    verdicts = [regular, agg[1], agg[2], agg[3], agg[4]]
    consistent = len(set(verdicts)) == 1
    out.claim("kcond-consistency", "regularity-kernel-conditions", 0.0 if consistent else 1.0,
              detail=(f"regular={regular} (1)={agg[1]} (2)={agg[2]} (3)={agg[3]} (4)={agg[4]}; "
                      f"grid n<={n_max}, m<={m_max}; (4) via identity on {via_identity} of {n_eval} pairs"
                      f"{cap_note}"))
    rep._cache[key] = out
    return out


def bi_regular_direct(rep: CovariantRep, k_max: int | None = None,
                      tol: float | None = None) -> tuple[bool, dict[int, float]]:
    """N(I_{E^k} ⊗ Ṽ†) ⊆ R(Ṽ^{†(k)}) for k ≤ k_max (stopping at the size cap)."""
    t = resolve_tol(tol)
    k_max = _kmax(k_max)
    wand = wandering_subspace(rep, t)
    profile: dict[int, float] = {}
    for k in range(1, k_max + 1):
        need = rep.n ** k * wand.dim
        if need == 0:
            profile[k] = 0.0
            continue
        try:
            dk = dagger_power(rep, k, t)
        except SizeCapError:
            break
        rk = onb_range(dk, tol=t)
        if need > rk.dim:
            profile[k] = 1.0
            continue
        profile[k] = leq_residual(tensor_subspace(rep.n ** k, wand), rk)
    ok = all(r <= t * (1 + rep.dim_h) for r in profile.values())
    return ok, profile


def is_bi_regular(rep: CovariantRep, k_max: int | None = None, tol: float | None = None) -> CheckReport:
    t = resolve_tol(tol)
    k_max = _kmax(k_max)
    key = ("is_bi_regular", k_max, t)
    if key in rep._cache:
        return rep._cache[key]
    out = CheckReport("bi-regularity", t)
    regular = is_regular(rep, k_max, t).get("regular").passed
    direct, profile = bi_regular_direct(rep, k_max, t)
    worst = max(profile.values(), default=0.0)
    out.measure("dagger-regular", "bi-regular-def", direct, worst,
                detail=f"checked for k <= {max(profile, default=0)}")
    bi = regular and direct
    out.measure("bi-regular", "bi-regular-def", bi)
    dual_regular = is_regular(cauchy_dual(rep, t), k_max, t).get("regular").passed
    # Ṽ† is regular exactly when its adjoint Ṽ' is
    out.claim("bi-regular:dual-route", "bi-regular-def", 0.0 if direct == dual_regular else 1.0,
              detail=f"direct={direct} dual_regular={dual_regular}")
    rinf, _ = generalized_range(rep, k_max, t)
    red = reduces(rep, rinf, t)
    out.measure("gen-range-reduces", "bi-regular-sufficient", red)
    out.implication("regular+reducing=>bi-regular", "bi-regular-sufficient", regular and red, bi)
    rep._cache[key] = out
    return out


def dagger_regularity(rep: CovariantRep, k_max: int | None = None, tol: float | None = None) -> CheckReport:
    """For hyper-dagger representations, regularity of Ṽ and of Ṽ† coincide."""
    t = resolve_tol(tol)
    k_max = _kmax(k_max)
    out = CheckReport("dagger-regularity", t)
    hyper, prof = is_hyper_dagger(rep, k_max, t)
    out.measure("hyper-dagger", "hyper-dagger-def", hyper, max(prof.values(), default=0.0),
                detail=f"checked for k <= {max(prof, default=1)}")
    regular = is_regular(rep, k_max, t).get("regular").passed
    direct, _ = bi_regular_direct(rep, k_max, t)
    out.measure("regular", "regular-def", regular)
    out.measure("dagger-regular", "bi-regular-def", direct)
    out.implication("regular<=>dagger-regular", "hyper-dagger-regularity", hyper, regular == direct)
    return out


def _restriction_unitarity(rep: CovariantRep, rinf: Subspace, tol: float) -> tuple[bool, float, str]:
    """Ṽ restricted to (E ⊗ R^∞) ∩ N(Ṽ)^⊥ maps isometrically onto R^∞."""
    v = rep.v_tilde
    dom = subspace_intersect(tensor_subspace(rep.n, rinf), coimage(v, tol=tol))
    b = dom.basis
    iso = fro(adj(b) @ adj(v) @ v @ b - eye(dom.dim)) if dom.dim else 0.0
    img = image(v, dom, tol=tol) if dom.dim else Subspace.zero(rep.dim_h, tol)
    onto = img.dim == rinf.dim and (rinf.dim == 0 or subspace_equal(img, rinf))
    res = iso if onto else max(iso, 1.0)
    ok = iso <= tol * (1 + dom.dim) and onto
    return ok, res, f"dim domain={dom.dim}, dim Rinf={rinf.dim}"


@dataclass
class WoldReport:
    wandering: Subspace
    brackets: Subspace
    brackets_dual: Subspace
    gen_range: Subspace
    gen_range_dual: Subspace
    stabilized_at: int | str
    report: CheckReport
    growth: list[int] = field(default_factory=list)


def _direct_sum(a: Subspace, b: Subspace, h: int) -> tuple[bool, float]:
    orth = orthogonality_residual(a, b)
    ok = orth <= 1e-9 and a.dim + b.dim == h
    return ok, orth if a.dim + b.dim == h else max(orth, 1.0)


def extended_wold(rep: CovariantRep, k_max: int, tol: float, out: CheckReport | None = None,
                  prefix: str = "") -> bool:
    """Extended Wold-type decomposition with the canonical wandering space."""
    t = tol
    e = wandering_subspace(rep, t)
    br = brackets(rep, e, k_max, t)
    rinf, _ = generalized_range(rep, k_max, t)
    checks = []
    # wandering: 𝓔 ⊥ Ṽ_k(E^k ⊗ 𝓔) for 1 ≤ k ≤ k_max
    cur, worst = e, 0.0
    for _ in range(k_max):
        cur = image(rep.v_tilde, tensor_subspace(rep.n, cur), tol=t)
        worst = max(worst, orthogonality_residual(e, cur))
    wand = worst <= t * (1 + e.dim)
    dsum, dres = _direct_sum(br.span, rinf, rep.dim_h)
    red1 = reduces(rep, br.span, t)
    red2 = reduces(rep, rinf, t)
    unit, ures, udet = _restriction_unitarity(rep, rinf, t)
    checks = [("wandering", wand, worst, ""), ("direct-sum", dsum, dres, ""),
              ("brackets-reduces", red1, None, ""), ("gen-range-reduces", red2, None, ""),
              ("restriction-unitary", unit, ures, udet)]
    if out is not None:
        for name, ok, res, det in checks:
            out.measure(f"{prefix}ext-wold:{name}", "extended-wold-def", ok, res, detail=det)
    return all(c[1] for c in checks)


def adjoint_conditions(rep: CovariantRep, rinf: Subspace, tol: float) -> dict[str, tuple[bool, float]]:
    """The five equivalent forms of Ṽ* = Ṽ† on R^∞(Ṽ)."""
    v = rep.v_tilde
    w = mp_inverse(rep, tol)
    p = projector(rinf)
    pe = projector(tensor_subspace(rep.n, rinf))
    sc = rep.scale * (1 + opnorm(w))
    r = {
        "i": fro(v @ adj(v) @ p - p) / sc,
        "ii": fro(p @ v @ adj(v) - p @ v @ w) / sc,
        "iii": fro(adj(v) @ p - w @ p) / sc,
        "iv": fro(adj(v) @ v @ pe - w @ v @ pe) / sc,
    }
    out = {k: (val <= tol, val) for k, val in r.items()}
    ok, res, _ = _restriction_unitarity(rep, rinf, tol)
    out["v"] = (ok, res)
    return out


def wold_report(rep: CovariantRep, k_max: int | None = None, tol: float | None = None) -> WoldReport:
    t = resolve_tol(tol)
    k_max = _kmax(k_max)
    out = CheckReport("wold", t)
    h = rep.dim_h
    dual = cauchy_dual(rep, t)
    e = wandering_subspace(rep, t)
    out.claim("wandering:P_E=I-VV+", "wandering-projection", wandering_projector_residual(rep, t))
    br = brackets(rep, e, k_max, t)
    br_d = brackets(dual, e, k_max, t)
    rinf, stab = generalized_range(rep, k_max, t)
    rinf_d, _ = generalized_range(dual, k_max, t)
    if br.stabilized_at == CAP_HIT or br_d.stabilized_at == CAP_HIT:
        out.measure("brackets-stabilized", "plumbing", False, detail="k_max reached before the join stopped growing")
    bi = is_bi_regular(rep, k_max, t).get("bi-regular").passed
    regular = is_regular(rep, k_max, t).get("regular").passed

    ok1, r1 = _direct_sum(br.span, rinf_d, h)
    ok2, r2 = _direct_sum(br_d.span, rinf, h)
    detail1 = f"dims {br.span.dim}+{rinf_d.dim} of {h}"
    detail2 = f"dims {br_d.span.dim}+{rinf.dim} of {h}"
    if bi:
        out.implication("wold:H=[E]_V+Rinf(V')", "bi-regular-wold", True, ok1, r1, 1e-9, detail=detail1)
        out.implication("wold:H=[E]_V'+Rinf(V)", "bi-regular-wold", True, ok2, r2, 1e-9, detail=detail2)
    else:
        out.measure("wold:H=[E]_V+Rinf(V')", "bi-regular-wold", ok1, r1, 1e-9, detail=detail1 + "; not bi-regular")
        out.measure("wold:H=[E]_V'+Rinf(V)", "bi-regular-wold", ok2, r2, 1e-9, detail=detail2 + "; not bi-regular")
    out.measure("wold:dim-bound", "plumbing", br.span.dim + rinf_d.dim <= h,
                detail=f"{br.span.dim}+{rinf_d.dim} <= {h}")

    ew = extended_wold(rep, k_max, t, out)
    out.measure("ext-wold", "extended-wold-def", ew)
    ew_dual = extended_wold(dual, k_max, t, out, prefix="dual:")
    out.measure("dual:ext-wold", "extended-wold-def", ew_dual)
    out.implication("ext-wold(V)<=>ext-wold(V')", "dual-extended-wold", bi, ew == ew_dual,
                    detail=f"V={ew} V'={ew_dual}")
    if bi and ew:
        res = max(equality_residual(rinf, rinf_d) if rinf.dim == rinf_d.dim else 1.0,
                  equality_residual(br.span, br_d.span) if br.span.dim == br_d.span.dim else 1.0)
        out.implication("ext-wold:equal-summands", "dual-extended-wold", True, res <= t * (1 + h), res)
    else:
        out.implication("ext-wold:equal-summands", "dual-extended-wold", False, False)

    # conditions for Ṽ* = Ṽ† on R^∞, equivalent on regular representations
    conds = adjoint_conditions(rep, rinf, t)
    for key, (ok, res) in conds.items():
        out.measure(f"adjoint-on-rinf:({key})", "adjoint-equals-dagger-on-gen-range", ok, res)
    values = {ok for ok, _ in conds.values()}
    if regular:
        out.claim("adjoint-on-rinf:consistency", "adjoint-equals-dagger-on-gen-range",
                  0.0 if len(values) == 1 else 1.0,
                  detail=" ".join(f"({k})={v[0]}" for k, v in conds.items()))
    else:
        out.skip("adjoint-on-rinf:consistency", "adjoint-equals-dagger-on-gen-range", "representation is not regular")
    holds = regular and conds["iii"][0]
    red = reduces(rep, rinf, t)
    out.implication("adjoint-on-rinf:reduces", "adjoint-equals-dagger-on-gen-range", holds, red)
    out.implication("adjoint-on-rinf:bi-regular", "adjoint-equals-dagger-on-gen-range", holds, bi)
    if holds and rinf.dim:
        # (Ṽ|_{E⊗R^∞})† = Ṽ†|_{R^∞} = Ṽ*|_{R^∞} = (Ṽ|_{E⊗R^∞})*
        bdom = tensor_subspace(rep.n, rinf).basis
        restricted = adj(rinf.basis) @ rep.v_tilde @ bdom
        lhs = lab_pinv(restricted, t)
        mid = adj(bdom) @ mp_inverse(rep, t) @ rinf.basis
        res = fro(lhs - mid) + fro(mid - adj(restricted))
        out.implication("adjoint-on-rinf:restricted-dagger", "adjoint-equals-dagger-on-gen-range", True,
                        res <= t * rep.scale, res)
    else:
        out.implication("adjoint-on-rinf:restricted-dagger", "adjoint-equals-dagger-on-gen-range", holds, True)

    # equal summands when both generalized ranges reduce
    red_d = reduces(dual, rinf_d, t)
    hyp = regular and red and red_d
    if hyp:
        res = max(equality_residual(rinf, rinf_d) if rinf.dim == rinf_d.dim else 1.0,
                  equality_residual(br.span, br_d.span) if br.span.dim == br_d.span.dim else 1.0)
        okd, _ = _direct_sum(br.span, rinf, h)
        out.implication("reducing:equal-summands", "reducing-equal-summands", True,
                        res <= t * (1 + h) and okd, res)
    else:
        out.implication("reducing:equal-summands", "reducing-equal-summands", False, False)
    hyp4 = regular and red
    out.implication("reducing:wold", "reducing-wold", hyp4, ok1 and ok2)
    return WoldReport(e, br.span, br_d.span, rinf, rinf_d, stab, out, br.join_dims)


def wold_failure_witnesses(rep: CovariantRep, k_max: int | None = None,
                           tol: float | None = None) -> CheckReport:
    """(i) H ≠ [𝓔]_Ṽ against (ii) R^∞(Ṽ') ≠ {0}, plus the canonical witnesses.

    Only the equivalence of (i) and (ii) is asserted. The canonical witness
    subspaces are sufficient but not necessary for the existence statements,
    so their checks are informational.
    """
    t = resolve_tol(tol)
    k_max = _kmax(k_max)
    out = CheckReport("wold-failure", t)
    h, ne = rep.dim_h, rep.n
    v = rep.v_tilde
    bi = is_bi_regular(rep, k_max, t).get("bi-regular").passed
    if not bi:
        out.measure("hypothesis:bi-regular", "wold-failure-equivalence", False, detail="hypothesis not met")
    dual = cauchy_dual(rep, t)
    e = wandering_subspace(rep, t)
    br = brackets(rep, e, k_max, t).span
    rinf_d, _ = generalized_range(dual, k_max, t)
    item_i = br.dim < h
    item_ii = rinf_d.dim > 0
    out.measure("(i)H!=[E]_V", "wold-failure-equivalence", item_i, detail=f"dim [E]_V={br.dim}")
    out.measure("(ii)Rinf(V')!=0", "wold-failure-equivalence", item_ii, detail=f"dim Rinf(V')={rinf_d.dim}")
    out.implication("(i)<=>(ii)", "wold-failure-equivalence", bi, item_i == item_ii)

    def tensor(m: Subspace) -> Subspace:
        return tensor_subspace(ne, m)

    m = rinf_d
    if m.dim:
        r3 = leq_residual(m, image(dual.v_tilde, tensor(m), tol=t))
        out.measure("witness(iii):M<=V'(E*M)", "wold-failure-equivalence", r3 <= t * (1 + m.dim), r3)
        r4a = leq_residual(m, onb_range(v, tol=t))
        r4b = leq_residual(image(adj(v), m, tol=t), tensor(m))
        ok4 = max(r4a, r4b) <= t * (1 + m.dim)
        out.measure("witness(iv):M<=R(V),V*M<=E*M", "wold-failure-equivalence", ok4, max(r4a, r4b))
    else:
        out.skip("witness(iii):M<=V'(E*M)", "wold-failure-equivalence", "R^inf(V') = {0}")
        out.skip("witness(iv):M<=R(V),V*M<=E*M", "wold-failure-equivalence", "R^inf(V') = {0}")
    m = br
    if m.dim < h:
        r5 = max(leq_residual(e, m), leq_residual(image(v, tensor(m), tol=t), m))
        out.measure("witness(v):E<=M,V(E*M)<=M", "wold-failure-equivalence", r5 <= t * (1 + h), r5)
        r6 = leq_residual(tensor(m), image(mp_inverse(rep, t), m, tol=t))
        out.measure("witness(vi):E*M<=V+M", "wold-failure-equivalence", r6 <= t * (1 + ne * h), r6)
    else:
        out.skip("witness(v):E<=M,V(E*M)<=M", "wold-failure-equivalence", "[E]_V = H")
        out.skip("witness(vi):E*M<=V+M", "wold-failure-equivalence", "[E]_V = H")

    # (vii): M1 = ⋁_{k≥1} Ṽ_k(E^k ⊗ 𝓔), M2 = R^∞(Ṽ')
    first = image(v, tensor(e), tol=t)
    m1 = brackets(rep, first, k_max, t).span if first.dim else Subspace.zero(h, t)
    m2 = rinf_d
    nonzero = m1.dim > 0 and m2.dim > 0
    c1 = leq_residual(image(v, tensor(m1), tol=t), m1) if m1.dim else 0.0
    m1e = subspace_join([m1, e])
    c2 = leq_residual(image(mp_inverse(rep, t), m1, tol=t), tensor(m1e)) if m1.dim else 0.0
    if m2.dim:
        p2 = projector(m2)
        c3 = equality_residual(image(p2 @ v, tensor(m2), tol=t), m2)
        c3 = c3 if image(p2 @ v, tensor(m2), tol=t).dim == m2.dim else 1.0
    else:
        c3 = 0.0
    ran = onb_range(v, tol=t)
    s12 = subspace_join([m1, m2])
    c4 = max(orthogonality_residual(m1, m2),
             equality_residual(s12, ran) if s12.dim == ran.dim else 1.0)
    worst = max(c1, c2, c3, c4)
    out.measure("witness(vii):M1,M2", "wold-failure-equivalence",
                nonzero and worst <= t * (1 + h), worst,
                detail=f"dim M1={m1.dim}, dim M2={m2.dim}")
    return out


@dataclass
class ProjectionSequence:
    p_list: list[np.ndarray]
    q_list: list[np.ndarray]
    p_limit: np.ndarray
    q_limit: np.ndarray
    stabilized_at: int | str


def projection_sequence(rep: CovariantRep, k_max: int | None = None,
                        tol: float | None = None) -> tuple[ProjectionSequence, CheckReport]:
    """P_k = Ṽ_kṼ^{†(k)}, Q_k = P_k − P_{k+1}, with stabilisation in place of strong limits."""
    t = resolve_tol(tol)
    k_max = _kmax(k_max)
    out = CheckReport("projection-sequence", t)
    h = rep.dim_h
    regular = is_regular(rep, k_max, t).get("regular").passed
    hyper, prof = is_hyper_dagger(rep, k_max, t)
    hyp = regular and hyper
    out.measure("hypothesis:regular", "projection-sequence", regular)
    out.measure("hypothesis:hyper-dagger", "projection-sequence", hyper,
                max(prof.values(), default=0.0), detail=f"checked for k <= {max(prof, default=1)}")

    ps = [eye(h)]
    stab: int | str = CAP_HIT
    for k in range(1, k_max + 2):
        try:
            pk = power(rep, k) @ dagger_power(rep, k, t)
        except SizeCapError:
            break
        ps.append(pk)
        if fro(pk - ps[-2]) <= t * (1 + h):
            stab = k - 1
            break
    qs = [ps[i] - ps[i + 1] for i in range(len(ps) - 1)]
    p_lim = ps[-1]
    q_lim = eye(h) - p_lim
    seq = ProjectionSequence(ps, qs, p_lim, q_lim, stab)
    if stab == CAP_HIT:
        out.measure("stabilized", "plumbing", False, detail="P_k still moving at k_max or size cap")

    p_e = eye(h) - rep.v_tilde @ mp_inverse(rep, t)
    out.implication("P_E=I-VV+", "projection-sequence", hyp,
                    fro(p_e - projector(wandering_subspace(rep, t))) <= t * (1 + h))
    herm = max(max(fro(p - adj(p)), fro(p @ p - p)) for p in ps)
    out.implication("P_k-orthogonal-projections", "projection-sequence", hyp, herm <= t * (1 + h), herm)
    rinf, _ = generalized_range(rep, k_max, t)
    lim_res = fro(p_lim - projector(rinf))
    out.implication("P_limit=P_Rinf", "projection-sequence", hyp and stab != CAP_HIT, lim_res <= 1e-9, lim_res)
    # Q_k by the closed formula Ṽ_k (I ⊗ P_𝓔) Ṽ^{†(k)}
    qf = 0.0
    for k, q in enumerate(qs):
        if k == 0:
            formula = p_e
        else:
            formula = power(rep, k) @ lift_identity(rep.n ** k, p_e) @ dagger_power(rep, k, t)
        qf = max(qf, fro(q - formula))
    out.implication("Q_k=Vk(I*P_E)V+(k)", "projection-sequence", hyp, qf <= t * (1 + h), qf)
    orth = 0.0
    for i in range(len(qs)):
        for j in range(len(qs)):
            if i != j:
                orth = max(orth, fro(qs[i] @ qs[j]))
    out.implication("Q-mutually-orthogonal", "projection-sequence", hyp, orth <= 1e-9, orth)
    tele = max((fro(sum(qs[:k], np.zeros((h, h), dtype=complex)) - (eye(h) - ps[k])) for k in range(len(ps))),
               default=0.0)
    out.claim("sum-Q=I-P_k", "projection-sequence", tele, 1e-10 * (1 + h))
    # R(Q) = {x : P_limit x = 0}
    # both are projectors, so rank is judged against norm 1
    cut = rank_cut((h, h), 1.0, t)
    rq = onb_range(q_lim, rank_tol=cut, tol=t)
    kp = onb_kernel(p_lim, rank_tol=cut, tol=t)
    rq_res = equality_residual(rq, kp) if rq.dim == kp.dim else 1.0
    out.implication("R(Q)=N(P_limit)", "projection-sequence", hyp, rq_res <= t * (1 + h), rq_res)
    rp = onb_range(p_lim, tol=t)
    out.implication("R(P)-reduces", "projection-sequence", hyp, reduces(rep, rp, t))
    out.implication("R(Q)-reduces", "projection-sequence", hyp, reduces(rep, rq, t))
    return seq, out


def dagger_power_on_range(rep: CovariantRep, n_max: int | None = None,
                          tol: float | None = None) -> CheckReport:
    """Ṽ_{i+1}† = Ṽ^{†(i+1)} on R(Ṽ_{i+1}) whenever (I_E⊗Ṽ_jṼ_j*)N(Ṽ) ⊆ N(Ṽ) for j ≤ i."""
    t = resolve_tol(tol)
    n_max = _kmax(n_max)
    out = CheckReport("dagger-power-on-range", t)
    kern = onb_kernel(rep.v_tilde, tol=t)
    all_h = True
    out.auto("closed-ranges", "dagger-power-on-range")
    for i in range(1, n_max + 1):
        try:
            vi = power(rep, i)
            vnext = power(rep, i + 1)
            dnext = dagger_power(rep, i + 1, t)
        except SizeCapError:
            out.skip(f"C[{i}]", "dagger-power-on-range", f"size cap at i={i}")
            break
        op = lift_identity(rep.n, vi @ adj(vi))
        hres = leq_residual(image(op, kern, tol=t), kern) if kern.dim else 0.0
        hi = hres <= t * (1 + kern.dim)
        out.measure(f"H[{i}]", "dagger-power-on-range", hi, hres)
        all_h &= hi
        rng = onb_range(vnext, tol=t)
        pk = lab_pinv(vnext, t)
        cres = fro((pk - dnext) @ rng.basis) / (1 + opnorm(pk))
        out.implication(f"C[{i}]", "dagger-power-on-range", all_h, cres <= t, cres)
    return out
