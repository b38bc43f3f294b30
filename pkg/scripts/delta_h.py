"""Fit the tangent at pi/2, then estimate Delta_H(0, e1) with anchors on the proxies of its contact sector.

    python scripts/delta_h.py [--replicates 500] [--n-target 96] [--out results/delta-h]
"""

import argparse
import math

from fpplab.config import ExperimentConfig
from fpplab.experiments import run_experiment
from fpplab.shape import estimate_shape, fit_tangent
from fpplab.weights import Distribution


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--replicates", type=int, default=500)
    ap.add_argument("--n-target", type=int, default=96)
    ap.add_argument("--shape-n", type=int, default=64)
    ap.add_argument("--shape-replicates", type=int, default=200)
    ap.add_argument("--seed", type=int, default=5)
    ap.add_argument("--out", default="results/delta-h")
    args = ap.parse_args()

    dist = Distribution.exponential(1.0)
    est = estimate_shape(dist, args.shape_n, args.shape_replicates, seed_base=11)
    tan = fit_tangent(est, math.pi / 2)
    s = tan.contact_sector
    print(f"tangent rho={tan.rho}, contact sector [{s.theta1:.4f}, {s.theta2:.4f}]")
    cfg = ExperimentConfig("delta-h", dist, args.seed, args.replicates, (args.n_target,), s)
    rep = run_experiment("delta-h", cfg)
    rep.extra["tangent"] = {"rho": list(tan.rho), "contact_sector": [s.theta1, s.theta2]}
    rep.write(args.out)
    st = rep.stats[0]
    print(f"Delta_H(0,e1): n={st['count']} mean={st.get('mean')} 99% CI={st.get('ci')}")
    print(f"verdicts: {rep.verdicts}")


if __name__ == "__main__":
    main()
