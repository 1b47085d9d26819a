"""Canonical JSON: sorted keys, integers only, rationals as num/den pairs."""

import json
from fractions import Fraction


def rational(x):
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def from_rational(doc):
    return Fraction(doc["num"], doc["den"])


def _check(obj, path="$"):
    if isinstance(obj, float):
        raise TypeError(f"float at {path}; canonical documents are exact")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _check(v, f"{path}[{i}]")


def dumps(doc) -> str:
    _check(doc)
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
