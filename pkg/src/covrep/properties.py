"""Modulo-kernel operator inequalities and the implications between them.

Each inequality ‖·‖² ≤ ‖·‖² over a subspace is turned into a hermitian form
restricted to an orthonormal basis of that subspace, and decided by its extreme
eigenvalue. The eigenvector is the witness; its Rayleigh quotient is the margin.

``domain`` arguments name coordinates of H. The quantifier then runs over
E^{⊗p} ⊗ span{e_j : j ∈ domain}, which is how truncated shifts are checked on
their exact indices only.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .config import SizeCapError, check_size, resolve_tol
from .duality import cauchy_dual, mp_inverse
from .linalg import adj, coimage, eigh, eye, image, leq_residual, lift_identity, opnorm, tensor_subspace
from .model import CovariantRep, gamma, power
from .report import Check, CheckReport, Verdict
from .shifts import interior_coordinates

MIN_SENSE = "min>=-tol"
MAX_SENSE = "max<=tol"


@dataclass
class PropertyVerdict:
    name: str
    verdict: Verdict
    margin: float
    sense: str
    tol: float
    witness: np.ndarray | None = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


def _domain_basis(rep: CovariantRep, power_: int, domain: Sequence[int] | None) -> np.ndarray:
    """Columns spanning E^{⊗p} ⊗ span{e_j : j ∈ domain}."""
    count = rep.n ** power_
    check_size(count * rep.dim_h, f"form on E^{power_}⊗H")
    if domain is None:
        return eye(count * rep.dim_h)
    cols = eye(rep.dim_h)[:, sorted(set(int(j) for j in domain))]
    return lift_identity(count, cols)


def _restrict_to_coimage(op: np.ndarray, d: np.ndarray, tol: float) -> np.ndarray:
    """Basis of (N(op) ∩ span d)^⊥ inside span d, i.e. of N(op|_d)^⊥."""
    if d.shape[1] == 0:
        return d
    return d @ coimage(op @ d, tol=tol).basis


def _extreme(name: str, form: np.ndarray, basis: np.ndarray, sense: str, thresh: float,
             tol: float, detail: str = "") -> PropertyVerdict:
    if basis.shape[1] == 0:
        return PropertyVerdict(name, Verdict.PASS, 0.0, sense, tol, None, "vacuous: empty domain")
    vals, vecs = eigh(adj(basis) @ form @ basis)
    if sense == MIN_SENSE:
        idx, ok = 0, vals[0] >= -thresh
    else:
        idx, ok = -1, vals[-1] <= thresh
    margin = float(vals[idx])
    witness = None if ok else basis @ vecs[:, idx]
    return PropertyVerdict(name, Verdict.PASS if ok else Verdict.FAIL_INFO, margin, sense, thresh,
                           witness, detail)


def hyponormal_form(rep: CovariantRep) -> np.ndarray:
    """Ṽ*Ṽ − I_E ⊗ ṼṼ* on E ⊗ H."""
    v = rep.v_tilde
    return adj(v) @ v - lift_identity(rep.n, v @ adj(v))


def is_hyponormal_mod(rep: CovariantRep, tol: float | None = None,
                      domain: Sequence[int] | None = None) -> PropertyVerdict:
    """‖(I_E ⊗ Ṽ*)η‖ ≤ ‖Ṽη‖ for η ∈ N(Ṽ)^⊥."""
    t = resolve_tol(tol)
    d = _domain_basis(rep, 1, domain)
    b = _restrict_to_coimage(rep.v_tilde, d, t)
    return _extreme("hyponormal-mod", hyponormal_form(rep), b, MIN_SENSE, t * rep.scale ** 2, t)


def is_hyponormal(rep: CovariantRep, tol: float | None = None) -> PropertyVerdict:
    """The same inequality over all of E ⊗ H."""
    t = resolve_tol(tol)
    d = _domain_basis(rep, 1, None)
    return _extreme("hyponormal", hyponormal_form(rep), d, MIN_SENSE, t * rep.scale ** 2, t)


def expansive_form(rep: CovariantRep, p: int) -> np.ndarray:
    """Σ_j (−1)^j C(p,j) L_j* L_j with L_j = I_{E^{p−j}} ⊗ Ṽ_j, on E^{⊗p} ⊗ H."""
    size = rep.n ** p * rep.dim_h
    form = np.zeros((size, size), dtype=np.complex128)
    for j in range(p + 1):
        lj = lift_identity(rep.n ** (p - j), power(rep, j))
        form += (-1) ** j * comb(p, j) * (adj(lj) @ lj)
    return form


def is_n_expansive_mod(rep: CovariantRep, p: int, tol: float | None = None,
                       domain: Sequence[int] | None = None) -> PropertyVerdict:
    """p-expansive modulo N(Ṽ), quantified over N(I_{E^{p−1}} ⊗ Ṽ)^⊥."""
    if p < 1:
        raise ValueError("n-expansive needs n >= 1")
    t = resolve_tol(tol)
    d = _domain_basis(rep, p, domain)
    l1 = lift_identity(rep.n ** (p - 1), rep.v_tilde)
    b = _restrict_to_coimage(l1, d, t)
    return _extreme(f"{p}-expansive-mod", expansive_form(rep, p), b, MAX_SENSE,
                    t * rep.scale ** (2 * p), t)


def concave_d1_form(rep: CovariantRep, tol: float | None = None) -> np.ndarray:
    """Ṽ₂*Ṽ₂ + I_E ⊗ Ṽ†Ṽ − 2 (I_E ⊗ Ṽ)*(I_E ⊗ Ṽ) on E^{⊗2} ⊗ H."""
    v2 = power(rep, 2)
    l1 = lift_identity(rep.n, rep.v_tilde)
    proj = lift_identity(rep.n, mp_inverse(rep, tol) @ rep.v_tilde)
    return adj(v2) @ v2 + proj - 2 * (adj(l1) @ l1)


def is_concave_mod(rep: CovariantRep, tol: float | None = None,
                   domain: Sequence[int] | None = None) -> PropertyVerdict:
    """Concave modulo N(Ṽ) through the unrestricted projector form."""
    t = resolve_tol(tol)
    d = _domain_basis(rep, 2, domain)
    return _extreme("concave-mod", concave_d1_form(rep, t), d, MAX_SENSE, t * rep.scale ** 4, t)


def is_concave_full(rep: CovariantRep, tol: float | None = None,
                    domain: Sequence[int] | None = None) -> PropertyVerdict:
    """‖Ṽ₂ζ‖² + ‖ζ‖² ≤ 2‖(I_E ⊗ Ṽ)ζ‖² for every ζ (in the domain)."""
    t = resolve_tol(tol)
    d = _domain_basis(rep, 2, domain)
    return _extreme("concave", expansive_form(rep, 2), d, MAX_SENSE, t * rep.scale ** 4, t)


def is_contractive(rep: CovariantRep, tol: float | None = None,
                   domain: Sequence[int] | None = None) -> PropertyVerdict:
    t = resolve_tol(tol)
    d = _domain_basis(rep, 1, domain)
    norm = opnorm(rep.v_tilde @ d) if d.shape[1] else 0.0
    ok = norm <= 1 + t
    return PropertyVerdict("contractive", Verdict.PASS if ok else Verdict.FAIL_INFO, norm - 1.0,
                           MAX_SENSE, t, None, f"norm={norm:.17g}")


def sqrt2_bound_operator(rep: CovariantRep, tol: float | None = None) -> np.ndarray:
    """[I_E⊗Ṽ, (I_E⊗ṼṼ†)Ṽ†] on (E^{⊗2}⊗H) ⊕ H.

    The inequality bounds the second column by ‖Ṽη‖ = ‖h‖ with h = Ṽη ∈ R(Ṽ),
    and Ṽ† vanishes on R(Ṽ)^⊥, so the inequality is ‖X‖ ≤ √2.
    """
    v = rep.v_tilde
    w = mp_inverse(rep, tol)
    return np.hstack([lift_identity(rep.n, v), lift_identity(rep.n, v @ w) @ w])


def sqrt2_bound_holds(rep: CovariantRep, tol: float | None = None) -> tuple[bool, float]:
    t = resolve_tol(tol)
    check_size(rep.n ** 2 * rep.dim_h, "sqrt2-bound operator")
    norm = opnorm(sqrt2_bound_operator(rep, t))
    return norm <= np.sqrt(2.0) + t, norm


def plain_corollary_form(rep: CovariantRep) -> np.ndarray:
    """2‖ζ‖² + 2‖Ṽη‖² − ‖(I_E⊗Ṽ)ζ + η‖² as a form on (E^{⊗2}⊗H) ⊕ (E⊗H)."""
    v = rep.v_tilde
    a = lift_identity(rep.n, v)
    x = np.hstack([a, eye(a.shape[0])])
    diag = np.zeros((x.shape[1], x.shape[1]), dtype=np.complex128)
    k = a.shape[1]
    diag[:k, :k] = 2 * eye(k)
    diag[k:, k:] = 2 * (adj(v) @ v)
    return diag - adj(x) @ x


def kernel_tensor_condition(rep: CovariantRep, k: int, tol: float | None = None) -> float:
    """(I_{E^k}⊗Ṽ) N(I_{E^k}⊗Ṽ)^⊥ ⊆ N(I_{E^{k−1}}⊗Ṽ)^⊥, as a containment residual.

    N(I_{E^k}⊗Ṽ)^⊥ = E^k ⊗ N(Ṽ)^⊥ and its image is E^k ⊗ R(Ṽ).
    """
    t = resolve_tol(tol)
    check_size(rep.n ** (k + 1) * rep.dim_h, f"kernel condition k={k}")
    coim = coimage(rep.v_tilde, tol=t)
    src = tensor_subspace(rep.n ** k, coim)
    img = image(lift_identity(rep.n ** k, rep.v_tilde), src, tol=t)
    target = tensor_subspace(rep.n ** (k - 1), coim)
    return leq_residual(img, target)


def _record(out: CheckReport, pv: PropertyVerdict, name: str, anchor: str) -> Check:
    return out.add(Check(name, anchor, pv.verdict, pv.margin, pv.tol, pv.witness,
                         f"margin {pv.sense}" + (f"; {pv.detail}" if pv.detail else "")))


def theorem_suite(rep: CovariantRep, tol: float | None = None, interior: bool = False,
                  k_cap: int = 4) -> CheckReport:
    """Concavity hypotheses against the Cauchy dual conclusions.

    With ``interior`` a truncated shift is checked on its exact indices. The
    conclusions that rest on every power of Ṽ (expansivity, and contractivity
    of the dual) cannot be certified from a finite window and are then
    reported as measurements.
    """
    t = resolve_tol(tol)
    out = CheckReport("concavity-theorems", t)
    dual = cauchy_dual(rep, t)
    d2 = d1 = d1b = None
    if interior:
        d2 = interior_coordinates(rep, 2)
        d1 = interior_coordinates(rep, 1)
        d1b = interior_coordinates(rep, 1, backward=True)
    local = interior and d2 is not None

    try:
        cm = is_concave_mod(rep, t, d2)
        cdef = is_n_expansive_mod(rep, 2, t, d2)
        cf = is_concave_full(rep, t, d2)
    except SizeCapError as exc:
        out.skip("concave-mod", "concave-mod-projector-form", str(exc))
        return out
    _record(out, cm, "concave-mod", "concave-mod-projector-form")
    _record(out, cdef, "2-expansive-mod", "n-expansive-mod-def")
    _record(out, cf, "concave", "concave-def")
    # the projector form is the definition's form compressed by P = I_E⊗Ṽ†Ṽ, so its top
    # eigenvalue is the definition's, raised to 0 when the domain meets N(I_E⊗Ṽ)
    dom = _domain_basis(rep, 2, d2)
    kernel_dim = dom.shape[1] - _restrict_to_coimage(lift_identity(rep.n, rep.v_tilde), dom, t).shape[1]
    expected = max(cdef.margin, 0.0) if kernel_dim else cdef.margin
    out.claim("concave-mod:forms-agree", "concave-mod-projector-form", abs(cm.margin - expected),
              t * rep.scale ** 4, detail=f"projector form {cm.margin:.3e}, definition {cdef.margin:.3e}")

    hyp_dual = is_hyponormal_mod(dual, t, d1b)
    _record(out, hyp_dual, "dual:hyponormal-mod", "hyponormal-mod-def")
    out.implication("concave-mod=>dual-hyponormal-mod", "cauchy-dual-hyponormal",
                    cm.passed, hyp_dual.margin >= -1e-8, hyp_dual.margin, 1e-8)

    ex1 = is_n_expansive_mod(rep, 1, t, d1)
    _record(out, ex1, "expansive-mod", "n-expansive-mod-def")
    if d1 is None:
        g = gamma(rep, t)
        out.claim("expansive-mod<=>gamma>=1", "reduced-minimum-modulus",
                  0.0 if ex1.passed == (g >= 1 - 1e-10) else 1.0, detail=f"gamma={g:.17g}")

    # dual contractivity is read on the columns where the dual is exact
    contr = is_contractive(dual, t, d2)
    _record(out, contr, "dual:contractive", "contractive-def")

    cond_res = {}
    for k in range(1, k_cap + 1):
        try:
            cond_res[k] = kernel_tensor_condition(rep, k, t)
        except SizeCapError:
            break
    cond_ok = all(r <= t * (1 + rep.n * rep.dim_h) for r in cond_res.values())
    out.measure("expansive:kernel-condition", "concave-expansive", cond_ok, max(cond_res.values(), default=0.0),
                detail=f"checked for n <= {max(cond_res, default=0)}")
    expansive_hyp = cm.passed and cond_ok
    if local:
        out.measure("concave=>expansive-mod", "concave-expansive", ex1.passed,
                    detail="finite window: expansivity needs every power")
        out.measure("concave=>dual-contractive", "concave-expansive", contr.passed,
                    detail="finite window: expansivity needs every power")
    else:
        out.implication("concave=>expansive-mod", "concave-expansive", expansive_hyp, ex1.passed, ex1.margin)
        out.implication("concave=>dual-contractive", "concave-expansive", expansive_hyp,
                        contr.margin <= 1e-8, contr.margin, 1e-8)

    full_hyp_ok = cf.passed
    out.implication("concave-full=>dual-hyponormal-mod", "concave-dual-hyponormal-contractive", full_hyp_ok,
                    hyp_dual.margin >= -1e-8, hyp_dual.margin, 1e-8)
    if local:
        out.measure("concave-full=>dual-contractive", "concave-dual-hyponormal-contractive", contr.margin <= 1e-8,
                    contr.margin, detail="finite window: contractivity needs every power")
    else:
        out.implication("concave-full=>dual-contractive", "concave-dual-hyponormal-contractive", full_hyp_ok,
                        contr.margin <= 1e-8, contr.margin, 1e-8)

    # the two closing corollaries are statements about the whole space
    try:
        bound_ok, bound_norm = sqrt2_bound_holds(rep, t)
    except SizeCapError as exc:
        out.skip("sqrt2-bound", "sqrt2-bound-hyponormal", str(exc))
    else:
        out.measure("sqrt2-bound:norm<=sqrt2", "sqrt2-bound-hyponormal", bound_ok, bound_norm - np.sqrt(2.0),
                    detail=f"norm={bound_norm:.17g}")
        hyp_self = is_hyponormal_mod(rep, t)
        _record(out, hyp_self, "hyponormal-mod", "hyponormal-mod-def")
        out.implication("sqrt2-bound=>hyponormal-mod", "sqrt2-bound-hyponormal", bound_ok, hyp_self.margin >= -1e-8,
                        hyp_self.margin, 1e-8)
    try:
        pc = _extreme("plain-corollary", plain_corollary_form(rep),
                      eye(rep.n ** 2 * rep.dim_h + rep.n * rep.dim_h), MIN_SENSE, t * rep.scale ** 2, t)
    except SizeCapError as exc:
        out.skip("plain-corollary", "plain-corollary-hyponormal-contractive", str(exc))
    else:
        _record(out, pc, "plain-corollary:hypothesis", "plain-corollary-hyponormal-contractive")
        full_hyp = is_hyponormal(rep, t)
        own_contr = is_contractive(rep, t)
        out.implication("plain-corollary=>hyponormal-contractive", "plain-corollary-hyponormal-contractive",
                        pc.passed, full_hyp.margin >= -1e-8 and own_contr.margin <= 1e-8,
                        min(full_hyp.margin, -own_contr.margin), 1e-8)
    if interior and d2 is None:
        out.skip("interior", "plumbing", "not a shift: interior mode has no effect")
    return out
