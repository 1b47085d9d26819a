"""F-signature estimates free-rank / q^d for increasing e, against a grid estimate
of the volume of the free region.

    python scripts/fsignature_convergence.py --ring sing-A1 --p 3 --e-max 4
"""

import argparse
import itertools
from dataclasses import dataclass
from fractions import Fraction

from frobken.errors import CapExceeded
from frobken.frobenius import DEFAULT_CAP, f_signature_estimate
from frobken.modules import canonical_class, from_shift
from frobken.ringspec import builtin


@dataclass
class Config:
    ring: str = "sing-A1"
    p: int = 3
    e_max: int = 4
    grid: int = 40
    cap: int = 2 ** 22


def free_region_volume(cone, K):
    """Midpoint-grid fraction of v in [0,1)^d with Con(-v) free."""
    hits = 0
    for idx in itertools.product(range(K), repeat=cone.dim):
        v = tuple(-Fraction(2 * i + 1, 2 * K) for i in idx)
        hits += canonical_class(from_shift(v, cone)).is_free
    return Fraction(hits, K ** cone.dim)


def run(cfg: Config):
    cone = builtin(cfg.ring).cone
    reference = free_region_volume(cone, cfg.grid)
    rows = []
    for e in range(1, cfg.e_max + 1):
        try:
            s = f_signature_estimate(cone, cfg.p, e, cap=cfg.cap)
        except CapExceeded:
            break
        rows.append((e, s, abs(s - reference)))
    return reference, rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ring", default="sing-A1")
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--e-max", type=int, default=4)
    ap.add_argument("--grid", type=int, default=40)
    args = ap.parse_args()
    cfg = Config(args.ring, args.p, args.e_max, args.grid)
    reference, rows = run(cfg)
    print(f"{cfg.ring} p={cfg.p}: grid reference {reference} ({float(reference):.5f}), K={cfg.grid}")
    for e, s, gap in rows:
        print(f"  e={e}  s_e={str(s):>14}  ({float(s):.5f})  gap={float(gap):.5f}")


if __name__ == "__main__":
    main()
