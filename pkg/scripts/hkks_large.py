"""Attack one HKKS instance over 3x3 matrices with entries in F_7[A_5] (d = 540)."""

from __future__ import annotations

import argparse
import time

import numpy as np

from lindecomp.attacks import ATTACKS
from lindecomp.protocols import ProtocolInstance, simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    t0 = time.perf_counter()
    tr = simulate(ProtocolInstance("hkks", {"large": True}, args.seed))
    t1 = time.perf_counter()
    rec = ATTACKS["hkks"](tr.public_view)
    t2 = time.perf_counter()
    ok = np.array_equal(rec.key, tr.honest_key)
    print(f"d={tr.public_view.space.d} basis={rec.stats['basis_dim']} field_ops={rec.stats['field_ops']}")
    print(f"simulate {t1 - t0:.2f}s, attack {t2 - t1:.2f}s, key recovered: {ok}")
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
