"""Verdict records shared by every certifier.

A check is either an unconditional claim (an identity that must hold), a
measurement (a property the representation may or may not have), or an
implication whose hypothesis is evaluated before its conclusion. Only a
violated claim or implication produces ``FAIL``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

import numpy as np


class Verdict(str, Enum):
    PASS = "pass"
    FAIL_INFO = "fail"
    FAIL = "FAIL"
    HYPOTHESIS_FAILED = "hypothesis-failed"
    NOT_APPLICABLE = "not-applicable"
    AUTO_PASS = "auto-pass"

    def __str__(self) -> str:
        return self.value


PASSING = {Verdict.PASS, Verdict.AUTO_PASS}


@dataclass
class Check:
    name: str
    anchor: str
    verdict: Verdict
    residual: float | None = None
    tol: float | None = None
    witness: np.ndarray | None = None
    detail: str = ""
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.verdict in PASSING

    def line(self) -> str:
        res = "" if self.residual is None else f" residual={self.residual:.3e}"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{self.verdict.value:>17}  {self.name} [{self.anchor}]{res}{extra}"


@dataclass
class CheckReport:
    title: str
    tol: float
    checks: list[Check] = field(default_factory=list)
    _clock: float = field(default_factory=time.perf_counter, repr=False)

    def __iter__(self) -> Iterator[Check]:
        return iter(self.checks)

    def __len__(self) -> int:
        return len(self.checks)

    def add(self, check: Check) -> Check:
        # wall time since the previous check is charged to this one
        now = time.perf_counter()
        check.seconds = now - self._clock
        self._clock = now
        self.checks.append(check)
        return check

    def extend(self, other: "CheckReport", prefix: str = "") -> None:
        for c in other.checks:
            if prefix:
                c = Check(**{**c.__dict__, "name": f"{prefix}{c.name}"})
            self.checks.append(c)
        self._clock = time.perf_counter()

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def verdict(self, name: str) -> Verdict:
        return self.get(name).verdict

    def select(self, prefix: str) -> list[Check]:
        return [c for c in self.checks if c.name.startswith(prefix)]

    @property
    def has_fail(self) -> bool:
        return any(c.verdict is Verdict.FAIL for c in self.checks)

    @property
    def all_pass(self) -> bool:
        """True when nothing failed, informational failures included."""
        return all(
            c.verdict in PASSING or c.verdict is Verdict.NOT_APPLICABLE for c in self.checks
        )

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.checks:
            out[c.verdict.value] = out.get(c.verdict.value, 0) + 1
        return out

    def text(self) -> str:
        head = f"# {self.title} (tol={self.tol:g})"
        return "\n".join([head] + [c.line() for c in self.checks])

    # constructors for the three kinds of check

    def claim(self, name: str, anchor: str, residual: float, tol: float | None = None,
              witness=None, detail: str = "") -> Check:
        """An identity that must hold: residual above tolerance is a FAIL."""
        t = self.tol if tol is None else tol
        v = Verdict.PASS if residual <= t else Verdict.FAIL
        return self.add(Check(name, anchor, v, float(residual), t, witness, detail))

    def measure(self, name: str, anchor: str, holds: bool, residual: float | None = None,
                tol: float | None = None, witness=None, detail: str = "") -> Check:
        """A property of the input; failure is informational."""
        v = Verdict.PASS if holds else Verdict.FAIL_INFO
        t = self.tol if tol is None else tol
        return self.add(Check(name, anchor, v, None if residual is None else float(residual), t, witness, detail))

    def implication(self, name: str, anchor: str, hypothesis: bool, conclusion: bool,
                    residual: float | None = None, tol: float | None = None,
                    witness=None, detail: str = "") -> Check:
        if not hypothesis:
            v = Verdict.HYPOTHESIS_FAILED
        else:
            v = Verdict.PASS if conclusion else Verdict.FAIL
        t = self.tol if tol is None else tol
        return self.add(Check(name, anchor, v, None if residual is None else float(residual), t, witness, detail))

    def skip(self, name: str, anchor: str, detail: str = "") -> Check:
        return self.add(Check(name, anchor, Verdict.NOT_APPLICABLE, detail=detail))

    def auto(self, name: str, anchor: str, detail: str = "finite-dimensional") -> Check:
        return self.add(Check(name, anchor, Verdict.AUTO_PASS, detail=detail))


DualityReport = CheckReport
