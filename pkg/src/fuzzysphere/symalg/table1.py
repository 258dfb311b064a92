"""Reproduction of the low-order basis table from an embedded fixture."""
from __future__ import annotations

import json
import time
from importlib import resources

import sympy as sp

from .algebra import build_pmn
from .convert import from_sympy


def load_table1() -> dict:
    with resources.files("fuzzysphere.data").joinpath("table1.json").open() as fh:
        return json.load(fh)


def table1_check() -> dict:
    """Compare build_pmn(n, m) for n <= 3 with every fixture entry.

    Flagged entries are reported with status ``advisory`` whatever the
    outcome; the rest are ``pass`` or ``mismatch``.
    """
    t0 = time.perf_counter()
    table = load_table1()
    rows = []
    for e in table["entries"]:
        n, m = e["n"], e["m"]
        expected = from_sympy(sp.sympify(e["hahn"]))
        built = build_pmn(n, m)
        matches = built == expected
        if e.get("advisory"):
            status = "advisory"
        else:
            status = "pass" if matches else "mismatch"
        row = {"n": n, "m": m, "expected": e["hahn"], "built": str(built), "matches": matches, "status": status}
        if not matches:
            row["ratio_to_expected"] = _ratio(built, expected)
        if e.get("note"):
            row["note"] = e["note"]
        rows.append(row)
    return {
        "fixture_version": table["version"],
        "entries": rows,
        "passed": sum(r["status"] == "pass" for r in rows),
        "advisory": sum(r["status"] == "advisory" for r in rows),
        "mismatches": [(r["n"], r["m"]) for r in rows if r["status"] == "mismatch"],
        "seconds": time.perf_counter() - t0,
    }


def _ratio(a, b) -> str | None:
    """Report a rational ratio between two single-term elements, if there is one."""
    for sign in (1, -1):
        if a == b * sign:
            return str(sign)
    return None
