"""Tabulate Frobenius pushforward decompositions of R over the builtin rings.

    python scripts/decomposition_table.py --primes 2 3 --e-max 2 --out results/decompositions.json
"""

import argparse
import json
import time
from dataclasses import asdict, dataclass, field

from frobken.errors import CapExceeded
from frobken.frobenius import DEFAULT_CAP, ffrt_scan, frobenius_pushforward
from frobken.modules import free_module
from frobken.ringspec import builtin

RINGS = ("A2", "sing-A1", "sing-A2", "cyclic-5-1-2", "cyclic-3-1-1-1", "square-cone")


@dataclass
class Config:
    rings: tuple = RINGS
    primes: tuple = (2, 3)
    e_max: int = 3
    cap: int = DEFAULT_CAP
    workers: int = 1
    out: str = field(default="")


def run(cfg: Config):
    rows = []
    for name in cfg.rings:
        cone = builtin(name).cone
        for p in cfg.primes:
            for e in range(1, cfg.e_max + 1):
                start = time.perf_counter()
                try:
                    D = frobenius_pushforward(free_module(cone), p, e, cap=cfg.cap, workers=cfg.workers)
                except CapExceeded:
                    break
                rows.append({
                    "ring": name, "p": p, "e": e, "rank": D.total_rank, "classes": len(D.classes),
                    "free": next((m for c, m in D.counts if c.is_free), 0),
                    "multiplicities": sorted((m for _, m in D.counts), reverse=True),
                    "seconds": round(time.perf_counter() - start, 3),
                })
            try:
                scan = ffrt_scan(cone, p, cfg.e_max, cap=cfg.cap, workers=cfg.workers)
                rows.append({"ring": name, "p": p, "ffrt_e0": scan.e0,
                             "stable_classes": len(scan.stabilized_classes) if scan.witnessed else None})
            except CapExceeded:
                pass
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rings", nargs="+", default=list(RINGS))
    ap.add_argument("--primes", nargs="+", type=int, default=[2, 3])
    ap.add_argument("--e-max", type=int, default=3)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="")
    args = ap.parse_args()
    cfg = Config(tuple(args.rings), tuple(args.primes), args.e_max, workers=args.workers, out=args.out)
    rows = run(cfg)
    for r in rows:
        if "e" in r:
            print(f"{r['ring']:>16} p={r['p']} e={r['e']}  rank={r['rank']:>6}  classes={r['classes']:>3}  "
                  f"free={r['free']:>5}  {r['seconds']:.3f}s")
        else:
            print(f"{r['ring']:>16} p={r['p']} FFRT e0={r['ffrt_e0']} stable classes={r['stable_classes']}")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": asdict(cfg), "rows": rows}, fh, indent=2)


if __name__ == "__main__":
    main()
