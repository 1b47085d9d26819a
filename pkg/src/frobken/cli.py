"""``frobken`` command-line interface.

Exit codes: 0 success or CERTIFIED, 2 INCONCLUSIVE (including FFRT without a
witnessed stabilization), 3 FAIL or a refuted decision, 1 error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .catalog import Catalog
from .config import RunConfig
from .endalg import CERTIFIED, FAIL, INCONCLUSIVE
from .errors import FrobkenError
from .frobenius import (
    DEFAULT_CAP,
    f_pure_witness,
    f_signature_estimate,
    f_steady_check,
    ffrt_scan,
    frobenius_pushforward,
    kunz_commutative_test,
)
from .modules import free_module, normalized_generators
from .ncb import (
    build_cover_ncb,
    build_dblowup,
    frobenius_certificate,
    verify_cover_coforgetful,
    verify_frobenius_iteration,
    verify_lemma_suite,
    verify_projection_compat,
)
from .ringspec import load_ring_spec
from .serialize import dumps, rational

COMMANDS = ["decompose", "classes", "fpure", "ffrt", "steady", "fsignature", "kunz",
            "endalg", "ncb-build", "ncb-certify", "diagrams", "selftest"]

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_FAIL = 0, 1, 2, 3


def exit_code_for(verdict):
    return {CERTIFIED: EXIT_OK, INCONCLUSIVE: EXIT_INCONCLUSIVE, FAIL: EXIT_FAIL,
            True: EXIT_OK, False: EXIT_FAIL}.get(verdict, EXIT_OK)


def _combine(verdicts):
    if FAIL in verdicts:
        return FAIL
    if INCONCLUSIVE in verdicts:
        return INCONCLUSIVE
    return CERTIFIED


def _class_rows(D):
    rows = []
    for c, m in D.counts:
        R = D.representatives.get(c)
        row = {"class": list(c.residue), "free": c.is_free, "multiplicity": m}
        if R is not None:
            row["bound"] = list(R.tight)
            row["generators"] = [list(g) for g in R.generators]
            row["normalized_generators"] = [list(g) for g in normalized_generators(R)]
        rows.append(row)
    return rows


def _build_ncb(spec, cfg):
    """D-blowup at e0 when given; the cover NC blowup for 1/n(a) otherwise."""
    if cfg.e0 is None and spec.is_cyclic_orthant_quotient:
        n, weights = spec.cyclic
        return build_cover_ncb(n, weights, cfg.p)
    return build_dblowup(spec.cone, cfg.p, 1 if cfg.e0 is None else cfg.e0, cap=cfg.cap)


def run_command(spec, command, cfg: RunConfig):
    """Dispatch; returns (document, verdict)."""
    cone = spec.cone
    p, e, cap, workers = cfg.p, cfg.e, cfg.cap, cfg.workers
    e_max, box = cfg.e_max, cfg.box
    head = {"command": command, "ring": spec.to_dict(), "cone": {
        "label": cone.label, "rays": [list(r) for r in cone.rays], "facets": [list(a) for a in cone.facets]}}
    if command == "decompose":
        D = frobenius_pushforward(free_module(cone), p, e, cap=cap, workers=workers)
        return {**head, "result": D.to_dict()}, True
    if command == "classes":
        D = frobenius_pushforward(free_module(cone), p, e, cap=cap, workers=workers)
        return {**head, "result": {"p": p, "e": e, "classes": _class_rows(D)}}, True
    if command == "fpure":
        u = f_pure_witness(cone, p)
        doc = {"p": p, "f_pure": u is not None, "witness_residue": list(u) if u is not None else None}
        return {**head, "result": doc}, u is not None
    if command == "ffrt":
        scan = ffrt_scan(cone, p, max(e_max, 2), cap=cap, workers=workers)
        verdict = True if scan.witnessed else INCONCLUSIVE
        return {**head, "result": scan.to_dict()}, verdict
    if command == "steady":
        e0 = 1 if cfg.e0 is None else cfg.e0
        M = frobenius_pushforward(free_module(cone), p, e0, cap=cap, workers=workers)
        res = f_steady_check(M, p, e_max, cap=cap, workers=workers)
        return {**head, "result": {"e0": e0, **res.to_dict()}}, res.steady
    if command == "fsignature":
        est = {str(k): rational(f_signature_estimate(cone, p, k, cap=cap, workers=workers))
               for k in range(1, e_max + 1)}
        return {**head, "result": {"p": p, "estimates": est}}, True
    if command == "kunz":
        regular = kunz_commutative_test(cone, p)
        doc = {"p": p, "regular": regular, "smooth_cone": cone.is_smooth(), "consistent": regular == cone.is_smooth()}
        return {**head, "result": doc}, regular if doc["consistent"] else FAIL
    if command in ("endalg", "ncb-build"):
        ncb = _build_ncb(spec, cfg)
        doc = ncb.to_dict() if command == "ncb-build" else ncb.end_algebra.to_dict()
        return {**head, "result": doc}, True
    if command == "ncb-certify":
        ncb = _build_ncb(spec, cfg)
        cert = frobenius_certificate(ncb, e, box, cap=cap)
        return {**head, "result": cert.to_dict()}, cert.verdict
    if command == "diagrams":
        ncb = _build_ncb(spec, cfg)
        reports = {
            "projection": verify_projection_compat(ncb, e, box, cap=cap).to_dict(),
            "iteration": verify_frobenius_iteration(ncb, e, 1, cap=cap).to_dict(),
            "lemma": [r.to_dict() for r in verify_lemma_suite(ncb, box, e, cap=cap)],
        }
        if ncb.cover is not None:
            reports["cover_coforgetful"] = verify_cover_coforgetful(ncb, e, box, cap=cap).to_dict()
        verdicts = [reports["projection"]["verdict"], reports["iteration"]["verdict"]]
        verdicts += [r["verdict"] for r in reports["lemma"]]
        if "cover_coforgetful" in reports:
            verdicts.append(reports["cover_coforgetful"]["verdict"])
        verdict = _combine(verdicts)
        return {**head, "result": {"reports": reports, "verdict": verdict}}, verdict
    if command == "selftest":
        return selftest()
    raise FrobkenError(f"unknown command {command!r}")


def selftest():
    from .ringspec import builtin

    checks = []
    a2 = builtin("A2").cone
    checks.append(("kunz A2 regular", kunz_commutative_test(a2, 2)))
    a1 = builtin("sing-A1").cone
    D = frobenius_pushforward(free_module(a1), 3, 1)
    checks.append(("A_1 p=3 two classes", len(D.classes) == 2 and D.total_rank == 9))
    sq = builtin("square-cone").cone
    checks.append(("conifold not regular", not kunz_commutative_test(sq, 2)))
    cert = frobenius_certificate(build_dblowup(a1, 3, 1), 1, 2)
    checks.append(("A_1 certificate N=2", cert.verdict == CERTIFIED))
    ok = all(v for _, v in checks)
    doc = {"command": "selftest", "version": __version__,
           "checks": [{"name": n, "pass": v} for n, v in checks], "pass": ok}
    return doc, ok


def render_table(doc):
    """Indented key/value rendering for humans."""
    lines = []

    def walk(obj, indent):
        pad = "  " * indent
        if isinstance(obj, dict):
            if set(obj) == {"num", "den"}:
                return [f"{Fraction(obj['num'], obj['den'])}"]
            for k in sorted(obj):
                v = obj[k]
                if isinstance(v, (dict, list)) and v and not _flat(v):
                    lines.append(f"{pad}{k}:")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}{k}: {_inline(v)}")
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                if isinstance(v, (dict, list)) and not _flat(v):
                    lines.append(f"{pad}- [{i}]")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}- {_inline(v)}")
        return lines

    walk(doc, 0)
    return "\n".join(lines) + "\n"


def _flat(v):
    if isinstance(v, dict):
        return set(v) == {"num", "den"}
    return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x))
               for x in v)


def _inline(v):
    if isinstance(v, dict) and set(v) == {"num", "den"}:
        return str(Fraction(v["num"], v["den"]))
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v).lower() if isinstance(v, bool) else str(v)


def build_parser():
    ap = argparse.ArgumentParser(prog="frobken", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"frobken {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", default="builtin:A2", help="spec.json path or builtin:NAME")
    ap.add_argument("--p", type=int)
    ap.add_argument("--e", type=int, default=1)
    ap.add_argument("--e0", type=int)
    ap.add_argument("--emax", type=int)
    ap.add_argument("--box", type=int)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--format", choices=["json", "table"], default="json")
    ap.add_argument("--catalog", help="catalog directory (default: $FROBKEN_CATALOG)")
    ap.add_argument("--no-cache", action="store_true")
    ap.add_argument("--force", action="store_true", help="lift the q^d enumeration cap")
    return ap


def _config(spec, args):
    p = args.p if args.p is not None else spec.p
    if p is None:
        raise FrobkenError("no prime given: pass --p or set p in the ring file")
    try:
        return RunConfig(
            p=p,
            e=args.e,
            e0=args.e0,
            e_max=args.emax if args.emax is not None else (spec.e_max or 3),
            box=args.box if args.box is not None else (spec.box if spec.box is not None else 6),
            cap=None if args.force else (spec.cap or DEFAULT_CAP),
            workers=args.workers,
        )
    except ValueError as exc:
        raise FrobkenError(str(exc)) from exc


def _emit(doc, fmt, out):
    out.write(dumps(doc) if fmt == "json" else render_table(doc))


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.p is not None:
            from .ringspec import _is_prime

            if not _is_prime(args.p):
                raise FrobkenError(f"--p {args.p} is not prime")
        if args.command == "selftest":
            doc, verdict = selftest()
            _emit(doc, args.format, out)
            return exit_code_for(verdict)
        spec = load_ring_spec(args.input)
        cfg = _config(spec, args)
        catalog = None if args.no_cache else Catalog.from_env(args.catalog)
        key = None
        if catalog is not None:
            key = catalog.key(spec.to_dict(), args.command, cfg.key_fields())
            hit = catalog.lookup(key)
            if hit is not None:
                _emit(hit.result, args.format, out)
                return hit.result.get("exit_code", EXIT_OK)
        doc, verdict = run_command(spec, args.command, cfg)
        doc["exit_code"] = exit_code_for(verdict)
        if catalog is not None:
            catalog.store(key, doc)
        _emit(doc, args.format, out)
        return doc["exit_code"]
    except FrobkenError as exc:
        doc = {"command": args.command, "error": exc.to_dict(), "exit_code": EXIT_ERROR}
        _emit(_jsonable(doc), args.format, out)
        print(f"frobken: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_ERROR


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return rational(obj)
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    return str(obj)


if __name__ == "__main__":
    sys.exit(main())
