"""JSON encodings for representations, matrices, weight tables and reports.

Every float is written as a hex-float string, which round-trips bit for bit,
next to a decimal copy for people. Readers prefer the hex field and fall back
to plain numbers so that hand-written files work.
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .linalg import Subspace
from .model import CovariantRep, make_rep
from .report import CheckReport

FORMAT = "covrep/rep-v1"


class InputError(ValueError):
    """Unreadable or ill-formed input file."""


def _hex(x: float) -> str:
    return float(x).hex()


def _num(x) -> float:
    if isinstance(x, str):
        try:
            # fromhex would read "1.5" as hexadecimal, so only use it for 0x strings
            return float.fromhex(x) if "0x" in x.lower() else float(x)
        except ValueError as exc:
            raise InputError(f"not a number: {x!r}") from exc
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(f"not a number: {x!r}")
    return float(x)


def _plain(x: float | None):
    """Decimal value safe for strict JSON."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else str(x)


def encode_matrix(m: np.ndarray) -> dict:
    a = np.asarray(m, dtype=np.complex128)
    rows, cols = a.shape
    return {
        "rows": rows,
        "cols": cols,
        "entries": [[[_hex(z.real), _hex(z.imag)] for z in row] for row in a],
        "decimal": [[[_plain(z.real), _plain(z.imag)] for z in row] for row in a],
    }


def decode_matrix(obj: Any, what: str = "matrix") -> np.ndarray:
    """Accepts {rows, cols, entries} or a bare row-major list of [re, im] pairs."""
    if isinstance(obj, dict):
        if "entries" not in obj:
            raise InputError(f"{what}: missing 'entries'")
        entries = obj["entries"]
        rows, cols = obj.get("rows"), obj.get("cols")
    else:
        entries, rows, cols = obj, None, None
    if not isinstance(entries, list):
        raise InputError(f"{what}: entries must be a list of rows")
    if rows is None:
        rows = len(entries)
        cols = len(entries[0]) if entries else 0
    if len(entries) != rows or any(not isinstance(r, list) or len(r) != cols for r in entries):
        raise InputError(f"{what}: expected {rows} rows of {cols} entries")
    out = np.zeros((rows, cols), dtype=np.complex128)
    for i, row in enumerate(entries):
        for j, z in enumerate(row):
            if isinstance(z, list):
                if len(z) != 2:
                    raise InputError(f"{what}[{i}][{j}]: expected [re, im]")
                out[i, j] = complex(_num(z[0]), _num(z[1]))
            else:
                out[i, j] = _num(z)
    if not np.all(np.isfinite(out)):
        raise InputError(f"{what}: non-finite entries")
    return out


def _encode_gens(gens) -> list | None:
    if gens is None:
        return None
    return [{"label": label, "matrix": encode_matrix(m)} for label, m in gens]


def _decode_gens(obj, what: str):
    if obj is None:
        return None
    if not isinstance(obj, list):
        raise InputError(f"{what}: expected a list of {{label, matrix}}")
    out = []
    for k, item in enumerate(obj):
        if not isinstance(item, dict) or "label" not in item or "matrix" not in item:
            raise InputError(f"{what}[{k}]: expected {{label, matrix}}")
        out.append((str(item["label"]), decode_matrix(item["matrix"], f"{what}[{k}]")))
    return out


def rep_to_json(rep: CovariantRep) -> dict:
    return {
        "format": FORMAT,
        "dim_h": rep.dim_h,
        "n": rep.n,
        "v_tilde": encode_matrix(rep.v_tilde),
        "sigma_generators": _encode_gens(rep.sigma_gens),
        "phi_generators": _encode_gens(rep.phi_gens),
        "metadata": rep.metadata,
    }


def rep_from_json(obj: Any) -> CovariantRep:
    if not isinstance(obj, dict):
        raise InputError("representation file must hold a JSON object")
    for key in ("dim_h", "n", "v_tilde"):
        if key not in obj:
            raise InputError(f"missing field {key!r}")
    v = decode_matrix(obj["v_tilde"], "v_tilde")
    try:
        return make_rep(obj["dim_h"], obj["n"], v,
                        _decode_gens(obj.get("sigma_generators"), "sigma_generators"),
                        _decode_gens(obj.get("phi_generators"), "phi_generators"),
                        obj.get("metadata") or {})
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, allow_nan=False)


def read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"{path} is not valid UTF-8 JSON: {exc}") from exc


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj) + "\n", encoding="utf-8")


def load_rep(path: str | Path) -> CovariantRep:
    return rep_from_json(read_json(path))


def save_rep(rep: CovariantRep, path: str | Path) -> None:
    write_json(path, rep_to_json(rep))


def digest(rep: CovariantRep) -> str:
    """sha256 over the canonical encoding of the matrix data."""
    canon = json.dumps({k: v for k, v in rep_to_json(rep).items() if k != "metadata"},
                       sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def subspace_to_json(s: Subspace) -> dict:
    return {"ambient": s.ambient, "rank": s.dim, "basis": encode_matrix(s.basis)}


def report_to_json(report: CheckReport, input_digest: str | None = None) -> dict:
    checks = []
    for c in report.checks:
        item = {
            "name": c.name,
            "anchor": c.anchor,
            "verdict": c.verdict.value,
            "residual": _plain(c.residual),
            "tol": _plain(c.tol),
            "detail": c.detail,
            "seconds": c.seconds,
        }
        if c.witness is not None:
            w = np.asarray(c.witness, dtype=np.complex128).ravel()
            item["witness"] = [[_plain(z.real), _plain(z.imag)] for z in w]
        checks.append(item)
    return {
        "tool": "covrep",
        "version": __version__,
        "input_digest": input_digest,
        "title": report.title,
        "tolerance": report.tol,
        "counts": report.counts(),
        "checks": checks,
    }


def parse_weights(obj: Any, n: int, window: tuple[int, int]) -> np.ndarray:
    """Weight table as an (n, window length) real array.

    Accepted forms: a list of numbers (n = 1, or shared by every i); a list of
    n such lists; ``{"offset": m, "weights": ...}`` when the list starts at
    index m; a list of ``{"i", "m", "w"}`` triplets (i is 1-based), optionally
    under the key ``"triplets"``. Every (i, m) in the window needs a value.
    """
    lo, hi = window
    size = hi - lo + 1

    def real(x, where: str) -> float:
        if isinstance(x, (list, dict)) or (isinstance(x, str) and "j" in x.lower()):
            raise InputError(f"{where}: complex weights are not supported")
        return _num(x)

    if isinstance(obj, dict) and "triplets" in obj:
        obj = obj["triplets"]
    if isinstance(obj, list) and obj and all(isinstance(t, dict) for t in obj):
        table = np.full((n, size), np.nan)
        for k, t in enumerate(obj):
            try:
                i, m, w = int(t["i"]), int(t["m"]), t["w"]
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(f"triplet {k}: expected integer i, m and a weight w") from exc
            if not (1 <= i <= n) or not (lo <= m <= hi):
                continue
            table[i - 1, m - lo] = real(w, f"triplet {k}")
        if np.isnan(table).any():
            i, m = np.argwhere(np.isnan(table))[0]
            raise InputError(f"weights: no entry for i={i + 1}, m={m + lo}")
        return table
    offset = lo
    if isinstance(obj, dict):
        if "weights" not in obj:
            raise InputError("weights object needs 'weights' or 'triplets'")
        offset = int(obj.get("offset", lo))
        obj = obj["weights"]
    if not isinstance(obj, list) or not obj:
        raise InputError("weights must be a nonempty list or an object")
    rows = obj if isinstance(obj[0], list) else [obj] * n
    if len(rows) != n:
        raise InputError(f"weights: expected {n} rows, got {len(rows)}")
    table = np.zeros((n, size))
    for i, row in enumerate(rows):
        for m in range(lo, hi + 1):
            k = m - offset
            if not (0 <= k < len(row)):
                raise InputError(f"weights: no entry for i={i + 1}, m={m}")
            table[i, m - lo] = real(row[k], f"weight i={i + 1}, m={m}")
    return table

