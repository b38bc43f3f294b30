"""Run every experiment in configs/ and write its outputs under results/<name>/.

    python scripts/run_all.py [--only midpoint,shape] [--out results] [--workers 4]
"""

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from fpplab.config import load_config
from fpplab.experiments import run_experiment

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = {
    "midpoint": "midpoint.cfg",
    "coalescence": "coalescence.cfg",
    "half-full": "half_full.cfg",
    "competition": "competition.cfg",
    "shape": "shape.cfg",
    "busemann": "busemann.cfg",
    "delta-h": "delta_h.cfg",
    "ordering": "ordering.cfg",
    "cluster": "cluster.cfg",
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--only", default="", help="comma-separated experiment names")
    ap.add_argument("--out", default=str(ROOT / "results"))
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    names = [n for n in args.only.split(",") if n] or list(CONFIGS)
    status = 0
    for name in names:
        cfg = dataclasses.replace(load_config(ROOT / "configs" / CONFIGS[name], name), workers=args.workers)
        t0 = time.time()
        rep = run_experiment(name, cfg)
        rep.write(Path(args.out) / name)
        flag = "ok" if rep.ok else "INVARIANT VIOLATED"
        print(f"{name:12s} {time.time() - t0:7.1f}s  {flag}  verdicts={rep.verdicts}")
        status |= 0 if rep.ok else 2
    return status


if __name__ == "__main__":
    sys.exit(main())
