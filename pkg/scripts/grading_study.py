"""Accuracy of the boundary fits as a function of the y-grid grading exponent.

For each grading and order the script reports
  * the worst relative error of the recovered fractional Laplacian of corpus
    data (fit of the spectral extension near y = 0), and
  * the worst node-wise deviation between the two sides of the trace relation
    for the commutator field, over nodes where the fitted coefficient is
    above 1e-6.

Usage: python scripts/grading_study.py [--n 256] [--K 200] [--pairs 4]
"""

import argparse
import warnings

import numpy as np

from fraclap.domain import Domain, build_grid, default_basis, make_corpus
from fraclap.estimates import solve_commutator_field
from fraclap.extension import YGrid, extend_spectral, neumann_trace, trace_relation
from fraclap.operators import TruncationWarning, spectral_frac_laplacian


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--K", type=int, default=200)
    p.add_argument("--pairs", type=int, default=4)
    p.add_argument("--gammas", default="3,4,5,6")
    p.add_argument("--alphas", default="0.25,0.5,0.75")
    args = p.parse_args()
    warnings.simplefilter("ignore", TruncationWarning)
    dom = Domain.interval(-1.0, 1.0)
    grid = build_grid(dom, args.n)
    basis = default_basis(grid)
    corpus = make_corpus(dom, grid, args.pairs, seed=0)
    print(f"{'gamma':>6} {'alpha':>6} {'trace fit rel err':>18} {'trace relation dev':>19}")
    for gamma in (float(s) for s in args.gammas.split(",")):
        for a in (float(s) for s in args.alphas.split(",")):
            yg = YGrid.for_alpha(a, float(basis.lambdas[0]), args.K, gamma=gamma)
            fit_err = rel_dev = 0.0
            for g, h in corpus:
                exact = spectral_frac_laplacian(g, basis, a).values
                got = neumann_trace(extend_spectral(g, basis, a, yg), a).trace.values
                fit_err = max(fit_err, np.max(np.abs(got - exact)) / np.max(np.abs(exact)))
                Z = solve_commutator_field(g, h, a, basis, args.K, ygrid=yg)
                lhs, rhs = trace_relation(Z, a)
                m = np.abs(lhs) > 1e-6
                if m.any():
                    rel_dev = max(rel_dev, float(np.max(np.abs(rhs[m] / lhs[m] - 1))))
            print(f"{gamma:6.2f} {a:6.2f} {fit_err:18.3e} {rel_dev:19.3e}", flush=True)


if __name__ == "__main__":
    main()
