"""Seeded batch runs of the implication suites over random representations."""
from __future__ import annotations

import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .config import SizeCapError, resolve_tol
from .duality import n_dagger_residual
from .model import CovariantRep
from .properties import theorem_suite
from .report import CheckReport, Verdict
from .serialize import rep_to_json, write_json
from .shifts import RANDOM_KINDS, make_rng, random_rep
from .structure import dagger_regularity, is_regular, wold_failure_witnesses, wold_report

# concave shifts are interleaved with every other kind so that they make up half the corpus
DEFAULT_SCHEDULE = ("dense", "concave-shift", "rank-deficient", "concave-shift",
                    "partial-isometry", "concave-shift", "left-invertible", "concave-shift")

SUITES = ("concave-dual", "concave-full-dual", "bi-regular-wold", "regularity-conditions",
          "gen-range-adjoint", "wold-failure", "hyper-dagger-regularity")


def parse_dims(text: str) -> tuple[int, int]:
    """'h<=4,n<=3' -> (4, 3)."""
    found = dict(re.findall(r"\b([hn])\s*<=\s*(\d+)", text))
    if set(found) != {"h", "n"} or re.sub(r"[hn]\s*<=\s*\d+|[,\s]", "", text):
        raise ValueError(f"dims must look like 'h<=4,n<=3', got {text!r}")
    h, n = int(found["h"]), int(found["n"])
    if h < 1 or n < 1:
        raise ValueError("dimension bounds must be positive")
    return h, n


def parse_kinds(text: str | None) -> tuple[str, ...]:
    if not text:
        return DEFAULT_SCHEDULE
    kinds = tuple(k.strip() for k in text.split(",") if k.strip())
    bad = [k for k in kinds if k not in RANDOM_KINDS]
    if bad or not kinds:
        raise ValueError(f"unknown kinds {bad}; choose from {', '.join(RANDOM_KINDS)}")
    return kinds


@dataclass
class TrialResult:
    trial: int
    kind: str
    dim_h: int
    n: int
    outcomes: list[tuple[str, str, str]] = field(default_factory=list)  # (suite, check, verdict)
    findings: list[dict] = field(default_factory=list)
    fail_rep: dict | None = None
    note: str = ""

    @property
    def failed(self) -> bool:
        return any(v == Verdict.FAIL.value for _, _, v in self.outcomes)


def _pick(report: CheckReport, suite: str, prefixes: tuple[str, ...], res: TrialResult) -> None:
    for c in report.checks:
        if c.name.startswith(prefixes):
            res.outcomes.append((suite, c.name, c.verdict.value))


def trial_rep(seed: int, trial: int, h_max: int, n_max: int, kinds: tuple[str, ...]) -> tuple[str, CovariantRep]:
    """The representation a fuzz trial draws, with its kind."""
    kind = kinds[trial % len(kinds)]
    rng = make_rng(seed, trial, stream=1)
    h = int(rng.integers(1, h_max + 1))
    n = 1 if kind == "left-invertible" else int(rng.integers(1, n_max + 1))
    return kind, random_rep(seed, h, n, kind, trial)


def run_trial(seed: int, trial: int, h_max: int, n_max: int, kinds: tuple[str, ...],
              tol: float | None = None, k_max: int = 6) -> TrialResult:
    t = resolve_tol(tol)
    kind, rep = trial_rep(seed, trial, h_max, n_max, kinds)
    res = TrialResult(trial, kind, rep.dim_h, rep.n)
    try:
        suite = theorem_suite(rep, t)
        _pick(suite, "concave-dual", ("concave-mod=>dual",), res)
        _pick(suite, "concave-full-dual", ("concave-full=>dual",), res)
        wold = wold_report(rep, k_max, t).report
        _pick(wold, "bi-regular-wold", ("wold:H=",), res)
        _pick(wold, "gen-range-adjoint", ("adjoint-on-rinf:",), res)
        _pick(is_regular(rep, k_max, t), "regularity-conditions", ("kcond-consistency",), res)
        _pick(wold_failure_witnesses(rep, k_max, t), "wold-failure", ("(i)<=>(ii)",), res)
        _pick(dagger_regularity(rep, k_max, t), "hyper-dagger-regularity", ("regular<=>dagger-regular",), res)
        try:
            r2 = n_dagger_residual(rep, 2, t)
        except SizeCapError:
            pass
        else:
            if r2 > 1e-6:
                res.findings.append({"trial": trial, "finding": "not 2-dagger", "residual": r2})
    except SizeCapError as exc:
        res.note = f"size cap: {exc}"
    if res.failed:
        res.fail_rep = rep_to_json(rep)
    return res


def _star(args):
    return run_trial(*args)


def run_fuzz(trials: int, seed: int, dims: str = "h<=4,n<=3", kinds: str | None = None,
             jobs: int = 1, tol: float | None = None, k_max: int = 6,
             fixtures_dir: str | Path | None = None) -> dict:
    """Run ``trials`` trials; the summary is deterministic in (seed, trials, dims, kinds)."""
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    h_max, n_max = parse_dims(dims)
    schedule = parse_kinds(kinds)
    t = resolve_tol(tol)
    args = [(seed, k, h_max, n_max, schedule, t, k_max) for k in range(trials)]
    if jobs > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_star, args, chunksize=max(1, trials // (4 * jobs))))
    else:
        results = [run_trial(*a) for a in args]

    counts = {s: {"pass": 0, "hypothesis-failed": 0, "FAIL": 0, "other": 0} for s in SUITES}
    fails, findings, notes = [], [], []
    kinds_seen: dict[str, int] = {}
    for r in results:
        kinds_seen[r.kind] = kinds_seen.get(r.kind, 0) + 1
        for suite, name, verdict in r.outcomes:
            key = verdict if verdict in ("pass", "hypothesis-failed", "FAIL") else "other"
            counts[suite][key] += 1
            if verdict == "FAIL":
                fails.append({"trial": r.trial, "kind": r.kind, "suite": suite, "check": name})
        findings.extend(r.findings)
        if r.note:
            notes.append({"trial": r.trial, "note": r.note})
        if r.fail_rep is not None and fixtures_dir is not None:
            path = Path(fixtures_dir) / f"fuzz-seed{seed}-trial{r.trial}.json"
            path.parent.mkdir(parents=True, exist_ok=True)
            write_json(path, r.fail_rep)
    return {
        "seed": seed,
        "trials": trials,
        "dims": {"h_max": h_max, "n_max": n_max},
        "schedule": list(schedule),
        "kinds": kinds_seen,
        "tolerance": t,
        "counts": counts,
        "fail_count": len(fails),
        "fails": fails,
        "informational": findings,
        "notes": notes,
    }
