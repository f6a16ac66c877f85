#!/usr/bin/env python3
"""Batch of seeded constrained solves on the positively curved model.

Every run should collapse to the reducible solution (Phi = 0, a0 = 1);
the certificate classifies each converged state.
"""

import argparse
import math
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from contactmono import (
    InvariantBackend,
    catalog_model,
    random_monopole_state,
    solve,
    vanishing_certificate,
)
from contactmono.solver import SolveOpts


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    model = catalog_model("round-s3")
    backend = InvariantBackend(model)
    verdicts = {}
    for k in range(args.runs):
        seed = args.seed + k
        init = random_monopole_state(model, backend, seed=seed)
        state, info = solve(
            model, None, init, SolveOpts(seed=seed, constraint=True, tol=1e-13)
        )
        v = vanishing_certificate(model, state)
        verdicts[v.verdict] = verdicts.get(v.verdict, 0) + 1
        sup_phi = math.sqrt(
            abs(state.phi.alpha) ** 2 + abs(state.phi.beta1bar) ** 2
        )
        print(
            f"seed {seed:>3}: converged={info.converged} it={info.iterations:>2} "
            f"|Phi|={sup_phi:.2e} a0={float(np.real(state.a.a0)):+.9f} -> {v.verdict}"
        )
    print()
    for verdict, count in sorted(verdicts.items()):
        print(f"{verdict}: {count}/{args.runs}")


if __name__ == "__main__":
    main()
