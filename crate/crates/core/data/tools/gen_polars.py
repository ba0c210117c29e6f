#!/usr/bin/env python3
"""Regenerate the coarse 360-degree lift/drag polars shipped in ../polars.

Each family is a thickness class of the airfoils used on the reference
blades (DU/NACA64 for the 5 MW rotor, FFA-W3 for the 10 MW and 22 MW
rotors). The attached-flow region is linear in alpha, blended into a
flat-plate post-stall model with a logistic weight.

    python3 gen_polars.py
"""

import math
import os

# name: (alpha0_deg, slope_per_deg, stall_pos_deg, stall_neg_deg, cd0)
FAMILIES = {
    "t60": (-1.5, 0.070, 6.0, -6.0, 0.060),
    "t48": (-2.5, 0.080, 8.0, -8.0, 0.030),
    "t40": (-3.0, 0.090, 8.5, -9.0, 0.020),
    "t35": (-3.0, 0.095, 9.0, -9.5, 0.015),
    "t30": (-3.0, 0.100, 10.0, -10.0, 0.011),
    "t25": (-3.5, 0.105, 11.0, -11.0, 0.0085),
    "t21": (-3.5, 0.108, 11.0, -11.0, 0.0075),
    "t18": (-3.8, 0.110, 10.5, -10.5, 0.0065),
}
CYLINDERS = {"cylinder1": 0.50, "cylinder2": 0.35}


def grid():
    alphas = list(range(-180, -30, 5)) + list(range(-30, 31, 1)) + list(range(35, 181, 5))
    return [float(a) for a in alphas]


def airfoil(a_deg, alpha0, slope, stall_pos, stall_neg, cd0):
    a = math.radians(a_deg)
    cl_lin = slope * (a_deg - alpha0)
    w = 1.0 / (1.0 + math.exp((a_deg - stall_pos) / 1.5))
    w *= 1.0 / (1.0 + math.exp(-(a_deg - stall_neg) / 1.5))
    cl_fp = 1.1 * math.sin(2.0 * a)
    cd_fp = cd0 + 1.6 * math.sin(a) ** 2
    cl = w * cl_lin + (1.0 - w) * cl_fp
    cd = w * (cd0 + 0.006 * cl_lin**2) + (1.0 - w) * cd_fp
    return cl, cd


def write(path, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write("alpha_deg,cl,cd\n")
        for a, cl, cd in rows:
            fh.write(f"{a:.1f},{cl:.5f},{cd:.5f}\n")


def main():
    out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "polars")
    for name, params in FAMILIES.items():
        write(os.path.join(out, f"{name}.csv"), [(a, *airfoil(a, *params)) for a in grid()])
    for name, cd in CYLINDERS.items():
        write(os.path.join(out, f"{name}.csv"), [(a, 0.0, cd) for a in grid()])


if __name__ == "__main__":
    main()
