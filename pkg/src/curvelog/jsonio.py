"""Canonical JSON helpers shared by all serializers.

Every artifact the package writes is serialized with sorted keys and
fixed separators so that equal objects produce byte-identical files.
"""
from __future__ import annotations

import json
from fractions import Fraction


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def frac_to_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def str_to_frac(s: str) -> Fraction:
    return Fraction(s)


def write_output(obj, out: str | None, fmt: str = "json") -> str:
    """Render ``obj`` (canonical JSON or indented text) and optionally
    write it to ``out``; returns the rendered string."""
    if fmt == "json":
        text = canonical_dumps(obj)
    else:
        text = json.dumps(obj, sort_keys=True, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    return text
