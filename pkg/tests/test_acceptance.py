"""Acceptance criteria 1 to 11, each at its stated tolerance.

Every test records one PASS/FAIL line; conftest prints them after the run.
"""
import json
import time

import numpy as np
import pytest

from covrep.cli import EXIT_CAP, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from covrep.duality import (
    cauchy_dual, dual_identity_suite, is_hyper_dagger, is_n_dagger, mp_inverse, penrose_residuals,
)
from covrep.fuzz import DEFAULT_SCHEDULE, run_fuzz, trial_rep
from covrep.linalg import adj, eye, onb_range, opnorm, pinv, projector
from covrep.model import make_rep
from covrep.properties import is_concave_full, is_concave_mod, is_hyponormal_mod
from covrep.report import Verdict
from covrep.serialize import dumps, rep_from_json, rep_to_json, save_rep
from covrep.shifts import (
    WeightedShiftSpec, build_shift, dirichlet_spec, interior_columns, interior_coordinates, make_rng,
    random_rep, shift_dagger_closed_form, shift_dual_closed_form, zero_at,
)
from covrep.structure import generalized_range, is_bi_regular, is_regular, projection_sequence, reduces, wold_report

from conftest import nilpotent_shift

RESULTS: dict[int, tuple[bool, str]] = {}

FUZZ_SEED, FUZZ_TRIALS = 42, 200


def record(num, ok, detail):
    RESULTS[num] = (bool(ok), detail)
    assert ok, f"criterion {num}: {detail}"


@pytest.fixture(scope="module")
def fuzz_corpus():
    """The (kind, rep) pairs drawn by ``fuzz --trials 200 --seed 42``."""
    return [trial_rep(FUZZ_SEED, t, 4, 3, DEFAULT_SCHEDULE) for t in range(FUZZ_TRIALS)]


@pytest.fixture(scope="module")
def fuzz_summary():
    return run_fuzz(FUZZ_TRIALS, FUZZ_SEED)


def test_1_penrose_suite():
    rng = make_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for k in range(500):
        r, c = (int(x) for x in rng.integers(1, 9, size=2))
        m = rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))
        if k % 3 == 0:
            # a rank-deficient third of the sample
            q = int(rng.integers(0, min(r, c) + 1))
            m = m[:, :q] @ (rng.standard_normal((q, c)) + 1j * rng.standard_normal((q, c)))
        res = max(penrose_residuals(m, pinv(m))) / (1 + opnorm(m))
        worst = max(worst, res)
    secs = time.perf_counter() - start
    record(1, worst <= 1e-10 and secs < 5, f"max scaled residual {worst:.2e}, {secs:.2f} s")


def test_2_duality_identity_suite():
    start = time.perf_counter()
    worst, inv, pi_worst = 0.0, 0.0, 0.0
    kinds = ("dense", "rank-deficient", "partial-isometry", "concave-shift")
    for k in range(200):
        rng = make_rng(2, k)
        h, n = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        kind = kinds[k % len(kinds)]
        rep = random_rep(2, h, n, kind, k)
        r = dual_identity_suite(rep, k_max=3)
        claims = [c for c in r if c.name.startswith(("dual:", "mp:"))]
        assert all(c.verdict is not Verdict.FAIL for c in r)
        worst = max([worst] + [c.residual for c in claims])
        twice = cauchy_dual(cauchy_dual(rep)).v_tilde
        inv = max(inv, float(np.max(np.abs(twice - rep.v_tilde))))
        if kind == "partial-isometry":
            pi_worst = max(pi_worst, float(np.max(np.abs(cauchy_dual(rep).v_tilde - rep.v_tilde))))
    secs = time.perf_counter() - start
    ok = worst <= 1e-9 and inv <= 1e-9 and pi_worst <= 1e-9 and secs < 10
    record(2, ok, f"max claim residual {worst:.2e}, V''-V {inv:.2e}, PI V'-V {pi_worst:.2e}, {secs:.2f} s")


def test_3_shift_closed_forms():
    worst_dual, worst_dag = 0.0, 0.0
    for k in range(50):
        rng = make_rng(3, k)
        n = int(rng.integers(1, 4))
        size = int(rng.integers(1, 10))
        kind = "bilateral" if k % 2 else "unilateral"
        lo = -int(rng.integers(0, size)) if kind == "bilateral" else 0
        spec = WeightedShiftSpec(kind, n, (lo, lo + size - 1), rng.uniform(0.1, 3.0, size=(n, size)))
        rep = build_shift(spec).rep
        cols = interior_columns(spec)
        if cols:
            d = cauchy_dual(rep).v_tilde[:, cols] - shift_dual_closed_form(spec)[:, cols]
            worst_dual = max(worst_dual, float(np.max(np.abs(d))))
        worst_dag = max(worst_dag, float(np.max(np.abs(mp_inverse(rep) - shift_dagger_closed_form(spec)))))
    record(3, worst_dual <= 1e-10 and worst_dag <= 1e-10, f"dual {worst_dual:.2e}, dagger {worst_dag:.2e}")


def test_4_wold_decomposition(fuzz_corpus, fuzz_summary):
    checked, worst = 0, 0.0
    for _, rep in fuzz_corpus:
        if not is_bi_regular(rep).get("bi-regular").passed:
            continue
        checked += 1
        w = wold_report(rep)
        h = rep.dim_h
        for a, b in ((w.brackets, w.gen_range_dual), (w.brackets_dual, w.gen_range)):
            assert a.dim + b.dim == h, (a.dim, b.dim, h)
            cross = opnorm(adj(a.basis) @ b.basis) if a.dim and b.dim else 0.0
            worst = max(worst, cross)
    fails = fuzz_summary["counts"]["bi-regular-wold"]["FAIL"]
    record(4, checked and worst <= 1e-9 and fails == 0,
           f"{checked} bi-regular reps, max cross-Gram {worst:.2e}, {fails} FAIL")


def test_5_regularity_and_adjoint_consistency(fuzz_corpus, fuzz_summary):
    regular_seen = 0
    for _, rep in fuzz_corpus:
        reg = is_regular(rep)
        # a condition holds when it holds at every grid index
        fams = {}
        for c in reg:
            if c.name[:6] in ("kcond1", "kcond2", "kcond3", "kcond4"):
                fams.setdefault(c.name[:6], []).append(c.passed)
        verdicts = {all(v) for v in fams.values()} | {reg.get("regular").passed}
        assert len(verdicts) == 1, fams
        assert reg.get("kcond-consistency").verdict is Verdict.PASS
        if reg.get("regular").passed:
            regular_seen += 1
            conds = [c.passed for c in wold_report(rep).report if c.name.startswith("adjoint-on-rinf:(")]
            assert len(set(conds)) == 1, conds
    fails = fuzz_summary["counts"]["regularity-conditions"]["FAIL"] + fuzz_summary["counts"]["gen-range-adjoint"]["FAIL"]
    record(5, fails == 0, f"{len(fuzz_corpus)} reps, {regular_seen} regular, {fails} FAIL")


def test_6_concave_implies_dual_hyponormal(fuzz_corpus, fuzz_summary):
    concave_kind = sum(kind == "concave-shift" for kind, _ in fuzz_corpus)
    mod_hits, full_hits, worst_margin, worst_norm = 0, 0, np.inf, 0.0
    for _, rep in fuzz_corpus:
        dual = cauchy_dual(rep)
        if is_concave_mod(rep).passed:
            mod_hits += 1
            worst_margin = min(worst_margin, is_hyponormal_mod(dual).margin)
        if is_concave_full(rep).passed:
            full_hits += 1
            worst_norm = max(worst_norm, opnorm(dual.v_tilde))
    fails = fuzz_summary["counts"]["concave-dual"]["FAIL"] + fuzz_summary["counts"]["concave-full-dual"]["FAIL"]
    ok = (concave_kind >= 50 and mod_hits and worst_margin >= -1e-8 and worst_norm <= 1 + 1e-8
          and fails == 0)
    record(6, ok, f"{concave_kind} concave-shift reps, {mod_hits} concave-mod (min dual margin "
                  f"{worst_margin:.2e}), {full_hits} concave (max dual norm {worst_norm:.6f}), {fails} FAIL")


def test_7_w_a_example():
    rep = build_shift(zero_at(dirichlet_spec("unilateral", 1, (0, 8)), 0)).rep
    dom = interior_coordinates(rep, 2)
    full = is_concave_full(rep, domain=dom)
    mod = is_concave_mod(rep, domain=dom)
    at_e0 = full.witness is not None and abs(abs(full.witness[0]) - 1) < 1e-9
    ok = (full.verdict is Verdict.FAIL_INFO and abs(full.margin - 1.0) <= 1e-9 and at_e0
          and mod.passed and mod.margin <= 1e-9)
    record(7, ok, f"concave margin {full.margin:.12f} at e0={at_e0}, concave-mod margin {mod.margin:.2e}")


def test_8_projection_theorem(fuzz_corpus):
    ex_a = make_rep(2, 2, np.hstack([np.eye(2), np.zeros((2, 2))]))
    ex_c = make_rep(4, 1, nilpotent_shift(4))
    reps = [ex_a, ex_c]
    for _, rep in fuzz_corpus:
        if len(reps) == 22:
            break
        if is_hyper_dagger(rep)[0]:
            reps.append(rep)
    assert len(reps) == 22
    orth = tele = lim = 0.0
    reducing = True
    for rep in reps:
        seq, _ = projection_sequence(rep)
        h = rep.dim_h
        q = seq.q_list
        for i in range(len(q)):
            for j in range(i + 1, len(q)):
                orth = max(orth, opnorm(q[i] @ q[j]))
        for k in range(len(seq.p_list)):
            tele = max(tele, opnorm(sum(q[:k], np.zeros((h, h))) - (eye(h) - seq.p_list[k])))
        lim = max(lim, opnorm(seq.p_limit - projector(generalized_range(rep)[0])))
        reducing &= reduces(rep, onb_range(seq.p_limit)) and reduces(rep, onb_range(seq.q_limit))
    ok = orth <= 1e-9 and tele <= 1e-10 and lim <= 1e-9 and reducing
    record(8, ok, f"{len(reps)} reps: Q orth {orth:.2e}, sum-Q {tele:.2e}, P_limit {lim:.2e}, reduce={reducing}")


def test_9_n_dagger_falsifiable():
    summary = run_fuzz(100, 42, kinds="rank-deficient")
    found = [f for f in summary["informational"] if f["finding"] == "not 2-dagger"]
    confirmed = 0
    for f in found:
        _, rep = trial_rep(42, f["trial"], 4, 3, ("rank-deficient",))
        ok, res = is_n_dagger(rep, 2)
        confirmed += (not ok) and res > 1e-6
    record(9, confirmed >= 1, f"{len(found)} findings, {confirmed} confirmed by is_n_dagger")


def test_10_exact_oracle():
    from test_exact_oracle import exact_profile, float_profile, integer_reps
    cases = integer_reps()
    agree = sum(exact_profile(*c) == float_profile(*c) for c in cases)
    record(10, agree == len(cases) == 10, f"{agree}/{len(cases)} integer reps agree")


def test_11_cli_contract(tmp_path, monkeypatch, capsys):
    exact = 0
    for k in range(100):
        rep = random_rep(11, 1 + k % 4, 1 + k % 3, "dense", k)
        back = rep_from_json(json.loads(dumps(rep_to_json(rep))))
        exact += np.array_equal(back.v_tilde, rep.v_tilde)
    path = tmp_path / "ex_a.json"
    save_rep(make_rep(2, 2, np.hstack([np.eye(2), np.zeros((2, 2))])), path)
    start = time.perf_counter()
    code_ok = main(["check", "--input", str(path), "--battery", "all"])
    secs = time.perf_counter() - start
    code_fail = main(["check", "--input", str(path), "--tolerance", "1e-300"])
    code_usage = main(["check", "--input", str(tmp_path / "missing.json")])
    monkeypatch.setenv("COVREP_MAX_DIM", "2")
    code_cap = main(["check", "--input", str(path)])
    codes = (code_ok, code_fail, code_usage, code_cap)
    ok = exact == 100 and codes == (EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP) and secs < 1
    record(11, ok, f"{exact}/100 bit-exact, exit codes {codes}, check all on EX-A {secs:.2f} s")
