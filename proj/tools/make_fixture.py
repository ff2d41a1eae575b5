#!/usr/bin/env python3
"""Regenerates fixtures/fixture64.ppm, the hermetic 64x64 test scene.

A smooth colour gradient background with discs, a ring, a striped band and
a checkerboard patch, so the image has both low- and high-frequency
content.
"""
import math
import sys

W = H = 64


def pixel(r, c):
    x = 2.0 * (c + 0.5) / W - 1.0
    y = 2.0 * (r + 0.5) / H - 1.0
    rgb = [0.5 + 0.4 * x, 0.3 + 0.3 * y, 0.6 - 0.2 * x * y]
    if (x + 0.35) ** 2 + (y + 0.3) ** 2 < 0.12:
        rgb = [0.95, 0.8, 0.15]
    d = math.hypot(x - 0.4, y - 0.35)
    if 0.22 < d < 0.34:
        rgb = [0.1, 0.2, 0.75]
    if -0.85 < y < -0.6:
        rgb = [0.9, 0.9, 0.9] if int((x + 1.0) * 8) % 2 == 0 else [0.2, 0.1, 0.1]
    if 0.45 < x < 0.9 and -0.45 < y < 0.0:
        cell = int((x - 0.45) / 0.09) + int((y + 0.45) / 0.09)
        rgb = [0.85, 0.15, 0.2] if cell % 2 == 0 else [0.15, 0.6, 0.25]
    return [min(255, max(0, round(v * 255))) for v in rgb]


def main(path):
    out = bytearray(b"P6\n64 64\n255\n")
    for r in range(H):
        for c in range(W):
            out.extend(pixel(r, c))
    with open(path, "wb") as f:
        f.write(out)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/fixture64.ppm")
