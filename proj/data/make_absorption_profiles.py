"""Regenerate the tabulated absorption profiles used by the optics examples.

Each profile is a plasmonic edge enhancement on top of the 0.27 film
absorption: alpha_j(x) = 0.27 + a_j exp(-x / l_j). The amplitudes are chosen
so that, with trapezoid integration on the output grid, the cumulative
polarization contrast and the mean perpendicular absorption hit the targets
at the stated distance.
"""

import math
import sys
from pathlib import Path

FLOOR = 0.27
GRID_NM = [10.0 * k for k in range(0, 101)]


def trapz_to(values, xs, x_end):
    total = 0.0
    for k in range(1, len(xs)):
        if xs[k] > x_end + 1e-9:
            break
        total += 0.5 * (values[k - 1] + values[k]) * (xs[k] - xs[k - 1])
    return total


def solve(x_eff, ratio, mean_perp, l_perp, l_par):
    unit_perp = [math.exp(-x / l_perp) for x in GRID_NM]
    unit_par = [math.exp(-x / l_par) for x in GRID_NM]
    base = FLOOR * x_eff
    a = (mean_perp * x_eff - base) / trapz_to(unit_perp, GRID_NM, x_eff)
    perp_int = mean_perp * x_eff
    par_int = perp_int * (1.0 - ratio) / (1.0 + ratio)
    b = (par_int - base) / trapz_to(unit_par, GRID_NM, x_eff)
    perp = [FLOOR + a * u for u in unit_perp]
    par = [FLOOR + b * u for u in unit_par]
    assert max(perp) <= 1.0 and max(par) <= 1.0
    return perp, par


def write(path, zone_width_um, perp, par):
    with open(path, "w", newline="\n") as out:
        out.write("# kind: absorption_profile\n")
        out.write("# zone_length_nm: 50\n")
        out.write(f"# zone_width_um: {zone_width_um}\n")
        out.write("x_nm,alpha_perp,alpha_par\n")
        for x, p, q in zip(GRID_NM, perp, par):
            out.write(f"{x:.17g},{p:.17g},{q:.17g}\n")


def main():
    here = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent
    perp, par = solve(190.0, 0.33, 0.58, 100.0, 50.0)
    write(here / "absorption_wide.csv", 2.8, perp, par)
    perp, par = solve(270.0, 0.18, 0.52, 100.0, 100.0)
    write(here / "absorption_narrow.csv", 1.5, perp, par)


if __name__ == "__main__":
    main()
