"""Derive section properties for ukb.csv from nominal I-section dimensions.

Usage: python3 derive_ukb.py > ukb.csv
"""
import csv
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))

# Root fillet spandrel: area and centroid offset from the web/flange corner.
def fillet(r):
    area = (1.0 - math.pi / 4.0) * r * r
    offset = r * (10.0 - 3.0 * math.pi) / (12.0 - 3.0 * math.pi)
    return area, offset


def props(h, b, tw, tf, r):
    hw = h - 2.0 * tf
    fa, fo = fillet(r)
    area = 2.0 * b * tf + hw * tw + 4.0 * fa
    yf = h / 2.0 - tf - fo
    iyy = (b * h**3 - (b - tw) * hw**3) / 12.0 + 4.0 * fa * yf * yf
    wpl = b * tf * (h - tf) + tw * hw * hw / 4.0 + 4.0 * fa * yf
    # Shear area: web between the flanges.
    avz = hw * tw
    return area, iyy, wpl, avz


def main():
    print("designation,mass_kg_m,depth_mm,Iyy_cm4,Wply_cm3,Avz_cm2,A_cm2")
    with open(os.path.join(HERE, "ukb_dimensions.csv")) as fh:
        for row in csv.DictReader(fh):
            h, b, tw, tf, r = (float(row[k]) for k in ("h_mm", "b_mm", "tw_mm", "tf_mm", "r_mm"))
            area, iyy, wpl, avz = props(h, b, tw, tf, r)
            print(
                f"{row['designation']},{row['mass_kg_m']},{h:.1f},"
                f"{iyy / 1e4:.0f},{wpl / 1e3:.0f},{avz / 1e2:.1f},{area / 1e2:.1f}"
            )


if __name__ == "__main__":
    main()
