"""Ring specifications: JSON ingestion, validation, and the builtin library."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import jsonschema

from .errors import FrobkenError, ParseError, ValidationError
from .lattice import ConeData, LatticePresentation, normalize_lattice, transpose

SCHEMA_VERSION = 1


def load_schema(name):
    return json.loads(resources.files("frobken.schemas").joinpath(f"{name}.schema.json").read_text())


def _is_prime(n):
    return n >= 2 and all(n % k for k in range(2, int(n ** 0.5) + 1))


def _pointer(path):
    return "/" + "/".join(str(x) for x in path) if path else ""


@dataclass(frozen=True)
class RingSpec:
    name: str
    rays: Optional[tuple] = None
    inequalities: Optional[tuple] = None
    basis: Optional[tuple] = None  # generators of L, one per entry
    cyclic: Optional[tuple] = None  # (n, weights)
    p: Optional[int] = None
    e_max: Optional[int] = None
    box: Optional[int] = None
    cap: Optional[int] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def dim(self):
        if self.rays is not None:
            return len(self.rays[0])
        if self.inequalities is not None:
            return len(self.inequalities[0])
        return len(self.cyclic[1])

    @property
    def original_rays(self):
        if self.rays is not None:
            return self.rays
        if self.inequalities is not None:
            return ConeData.from_inequalities(self.inequalities).rays
        d = self.dim
        return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))

    @property
    def presentation(self):
        d = self.dim
        if self.cyclic is not None:
            return LatticePresentation(d, modulus=self.cyclic[0], weights=self.cyclic[1])
        if self.basis is not None:
            return LatticePresentation(d, basis=transpose(self.basis))
        return LatticePresentation(d)

    def normalized(self):
        """(U, cone) with the lattice rewritten as Z^d."""
        if "norm" not in self._cache:
            self._cache["norm"] = normalize_lattice(self.presentation, self.original_rays, self.name)
        return self._cache["norm"]

    @property
    def cone(self) -> ConeData:
        return self.normalized()[1]

    @property
    def is_cyclic_orthant_quotient(self):
        d = self.dim
        ident = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
        return self.cyclic is not None and sorted(self.original_rays) == sorted(ident)

    def to_dict(self):
        doc = {"name": self.name}
        if self.rays is not None:
            doc["cone"] = {"rays": [list(r) for r in self.rays]}
        elif self.inequalities is not None:
            doc["cone"] = {"inequalities": [list(r) for r in self.inequalities]}
        if self.basis is not None:
            doc["lattice"] = {"basis": [list(r) for r in self.basis]}
        if self.cyclic is not None:
            doc["cyclic"] = {"n": self.cyclic[0], "weights": list(self.cyclic[1])}
        for key in ("p", "e_max", "box", "cap"):
            v = getattr(self, key)
            if v is not None:
                doc[key] = v
        return doc

    def with_overrides(self, **kw):
        doc = self.to_dict()
        doc.update({k: v for k, v in kw.items() if v is not None})
        return spec_from_dict(doc)


def _validate(doc):
    validator = jsonschema.Draft202012Validator(load_schema("ring_spec"))
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise ValidationError(err.message, pointer=_pointer(err.absolute_path))


def spec_from_dict(doc) -> RingSpec:
    if not isinstance(doc, dict):
        raise ValidationError("ring spec must be a JSON object", pointer="")
    _validate(doc)
    cone = doc.get("cone", {})
    rays = cone.get("rays")
    ineq = cone.get("inequalities")
    mat = rays if rays is not None else ineq
    key = "rays" if rays is not None else "inequalities"
    if mat is not None:
        d = len(mat[0])
        for i, row in enumerate(mat):
            if len(row) != d:
                raise ValidationError(f"row {i} has length {len(row)}, expected {d}", pointer=f"/cone/{key}/{i}")
    cyc = doc.get("cyclic")
    if cyc is not None:
        d = len(mat[0]) if mat is not None else len(cyc["weights"])
        if len(cyc["weights"]) != d:
            raise ValidationError(
                f"{len(cyc['weights'])} weights for a cone of dimension {d}", pointer="/cyclic/weights"
            )
    basis = doc.get("lattice", {}).get("basis")
    if basis is not None:
        d = len(mat[0])
        if len(basis) != d or any(len(r) != d for r in basis):
            raise ValidationError(f"lattice basis must be {d} vectors of length {d}", pointer="/lattice/basis")
    p = doc.get("p")
    if p is not None and not _is_prime(p):
        raise ValidationError(f"p = {p} is not prime", pointer="/p")
    name = doc.get("name") or _default_name(doc)
    spec = RingSpec(
        name=name,
        rays=tuple(map(tuple, rays)) if rays is not None else None,
        inequalities=tuple(map(tuple, ineq)) if ineq is not None else None,
        basis=tuple(map(tuple, basis)) if basis is not None else None,
        cyclic=(cyc["n"], tuple(cyc["weights"])) if cyc is not None else None,
        p=p,
        e_max=doc.get("e_max"),
        box=doc.get("box"),
        cap=doc.get("cap"),
    )
    try:
        spec.normalized()
    except FrobkenError as exc:
        raise ValidationError(str(exc), pointer="/cone", cause=exc.code) from exc
    return spec


def _default_name(doc):
    if "cyclic" in doc and "cone" not in doc:
        c = doc["cyclic"]
        return f"cyclic-{c['n']}-" + "-".join(map(str, c["weights"]))
    return "custom"


# -- builtins --------------------------------------------------------------

_SQUARE = [[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]]


def builtin_names():
    return ["A1", "A2", "A3", "A4", "cyclic-2-1-1", "cyclic-3-1-2", "cyclic-3-1-1",
            "cyclic-3-1-1-1", "cyclic-5-1-2", "sing-A1", "sing-A2", "veronese-2-2",
            "veronese-3-2", "veronese-2-3", "square-cone", "conifold"]


def builtin(name) -> RingSpec:
    m = re.fullmatch(r"A([1-4])", name)
    if m:
        d = int(m.group(1))
        rays = [[int(i == j) for j in range(d)] for i in range(d)]
        return spec_from_dict({"name": name, "cone": {"rays": rays}})
    m = re.fullmatch(r"cyclic-(\d+)((?:-\d+)+)", name)
    if m:
        n = int(m.group(1))
        weights = [int(x) for x in m.group(2).split("-")[1:]]
        return spec_from_dict({"name": name, "cyclic": {"n": n, "weights": weights}})
    m = re.fullmatch(r"veronese-(\d+)-(\d+)", name)
    if m:
        r, d = int(m.group(1)), int(m.group(2))
        return builtin(f"cyclic-{r}-" + "-".join(["1"] * d))
    if name == "sing-A1":
        return builtin("cyclic-2-1-1")
    if name == "sing-A2":
        return builtin("cyclic-3-1-2")
    if name in ("square-cone", "conifold"):
        return spec_from_dict({"name": "square-cone", "cone": {"rays": _SQUARE}})
    raise ParseError(f"unknown builtin {name!r}", known=builtin_names())


def load_ring_spec(source) -> RingSpec:
    """Load ``builtin:NAME``, a bare builtin name, or a JSON file path."""
    if isinstance(source, dict):
        return spec_from_dict(source)
    source = str(source)
    if source.startswith("builtin:"):
        return builtin(source[len("builtin:"):])
    try:
        text = open(source, encoding="utf-8").read()
    except FileNotFoundError:
        try:
            return builtin(source)
        except ParseError:
            raise ParseError(f"no such file or builtin: {source!r}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc.msg} at line {exc.lineno}", line=exc.lineno) from exc
    return spec_from_dict(doc)
