"""Recompute the golden condition-(ii) values with the brute-force oracle and
write them to tests/golden.json. Takes about a minute."""

import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracles import brute_condition_ii  # noqa: E402

from maltsev_kit.corpus import builtin  # noqa: E402

FEASIBLE = ["trivial", "set2", "set3", "set4", "semilattice2", "chain3-semilattice",
            "z2", "lattice2", "chain3-lattice", "d01-majority"]


def main():
    golden = {}
    for name in FEASIBLE:
        k, size = brute_condition_ii(builtin(name))
        golden[name] = {"free_size": size, "k_star": k}
        print(f"{name:20s} |F(4)| = {size:4d}  k* = {k if k is not None else 'none'}")
    out = ROOT / "tests" / "golden.json"
    out.write_text(json.dumps(golden, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
