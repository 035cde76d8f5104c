#!/usr/bin/env python3
"""Writes the fixed synthetic 128-channel montage to data/channel_layout_128.csv.

Positions are a Fibonacci lattice over a head cap (z >= -0.3) on the unit
sphere; x points right, y toward the nose, z up.
"""
import math
import pathlib

N = 128
Z_MIN = -0.3

rows = []
golden = math.pi * (3.0 - math.sqrt(5.0))
for i in range(N):
    z = 1.0 - (i + 0.5) / N * (1.0 - Z_MIN)
    r = math.sqrt(max(0.0, 1.0 - z * z))
    theta = golden * i
    rows.append((f"E{i + 1}", r * math.cos(theta), r * math.sin(theta), z))

out = pathlib.Path(__file__).resolve().parent.parent / "data" / "channel_layout_128.csv"
with out.open("w") as f:
    f.write("label,x,y,z\n")
    for label, x, y, z in rows:
        f.write(f"{label},{x:.6f},{y:.6f},{z:.6f}\n")
