#!/usr/bin/env python3
"""Write Thomas-Fermi atom tables (r, V_TF, rho_TF) for a list of charges."""

import argparse

from scottlab.thomas_fermi import atomic_tf, solve_universal_tf


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument(
        "--z",
        type=lambda s: tuple(float(v) for v in s.split(",")),
        default=(1.0,),
        help="comma-separated charges",
    )
    ap.add_argument("--prefix", default="tf_atom", help="output file prefix")
    args = ap.parse_args()

    universal = solve_universal_tf()
    for z in args.z:
        sol = atomic_tf(z, universal=universal)
        path = f"{args.prefix}_z{z:g}.csv"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# z={z:.17g} E_TF={sol.E_TF:.17g} D_rho={sol.D_rho:.17g}\n")
            fh.write("r,v_tf,rho_tf\n")
            for r, v, rho in zip(sol.r, sol.v_tf_table, sol.rho_tf_table):
                fh.write(f"{r:.17g},{v:.17g},{rho:.17g}\n")
        print(f"{path}: E_TF = {sol.E_TF:.8f}, slope = "
              f"{sol.universal.initial_slope:.7f}")


if __name__ == "__main__":
    main()
