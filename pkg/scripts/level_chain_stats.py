"""Largest factor count seen in sampled level-chain certificates, per algebra
and k, next to the bound r(k).

    python3 scripts/level_chain_stats.py [--samples N] [--seed S] [--kmax K]
"""

import argparse

import numpy as np

from maltsev_kit.algebra import parse_term
from maltsev_kit.bounds import r_of_k, sample_level_certificates
from maltsev_kit.corpus import builtin
from maltsev_kit.maltsev import LATTICE_MAJORITY, majority_chain


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--kmax", type=int, default=8)
    ap.add_argument("--algebras", nargs="+", default=["lattice2", "chain3-lattice", "N5", "M3"])
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'algebra':16s} {'k':>3s} {'r(k)':>5s} {'max':>4s} {'mean':>6s} {'ok':>4s}")
    for name in args.algebras:
        A = builtin(name)
        base = majority_chain(A, parse_term(LATTICE_MAJORITY))
        for k in range(3, args.kmax + 1):
            certs = sample_level_certificates(A, base.padded(k), args.samples, rng)
            counts = [c.factors for c in certs]
            ok = all(c.verified for c in certs)
            print(f"{name:16s} {k:3d} {r_of_k(k):5d} {max(counts):4d} "
                  f"{np.mean(counts):6.2f} {'yes' if ok else 'NO':>4s}")


if __name__ == "__main__":
    main()
