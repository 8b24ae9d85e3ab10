#!/usr/bin/env python3
"""Regenerate the bundled spectra under data/.

Writes extinction curves for water and the thirteen stock flavors, plus the
three normalized channel responsivity curves. All curves are smooth parametric
stand-ins tabulated on a 5 nm grid over 400-700 nm; extinction values are in
arbitrary normalized units (they are only ever multiplied by a dimensionless
path-length scale).

Running this script twice produces byte-identical files.
"""

import math
import os

GRID = [400 + 5 * i for i in range(61)]
OUT = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


def gauss(lam, mu, sigma):
    return math.exp(-0.5 * ((lam - mu) / sigma) ** 2)


def bigauss(lam, mu, s1, s2):
    return gauss(lam, mu, s1 if lam < mu else s2)


def write_csv(path, rows):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write("wavelength_nm,value\n")
        for lam, v in rows:
            f.write("%d,%.12g\n" % (lam, v))


# Pure-water absorption, tabulated at 10 nm from published curves and scaled
# into the same normalized units as the flavor curves. Minimum sits near
# 420 nm; absorption rises steeply toward the red end.
WATER_10NM = [
    (400, 0.0066), (410, 0.0053), (420, 0.0047), (430, 0.0049), (440, 0.0063),
    (450, 0.0092), (460, 0.0098), (470, 0.0106), (480, 0.0127), (490, 0.0150),
    (500, 0.0204), (510, 0.0325), (520, 0.0409), (530, 0.0434), (540, 0.0474),
    (550, 0.0565), (560, 0.0619), (570, 0.0695), (580, 0.0896), (590, 0.1351),
    (600, 0.2224), (610, 0.2644), (620, 0.2755), (630, 0.2916), (640, 0.3108),
    (650, 0.3400), (660, 0.4100), (670, 0.4390), (680, 0.4650), (690, 0.5160),
    (700, 0.6240),
]
WATER_SCALE = 0.1


def water_value(lam):
    pts = WATER_10NM
    if lam <= pts[0][0]:
        return pts[0][1] * WATER_SCALE
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if x0 <= lam <= x1:
            t = (lam - x0) / (x1 - x0)
            return (y0 + t * (y1 - y0)) * WATER_SCALE
    return pts[-1][1] * WATER_SCALE


# flavor -> (baseline, [(center_nm, sigma_nm, amplitude), ...])
FLAVORS = {
    "apple":            (0.10, [(445, 35, 0.55)]),
    "apricot":          (0.14, [(455, 40, 1.20), (520, 40, 0.45)]),
    "banana":           (0.09, [(445, 35, 0.80)]),
    "blueberry":        (0.35, [(545, 55, 2.60), (430, 30, 0.80)]),
    "mango":            (0.12, [(460, 45, 1.50), (530, 35, 0.40)]),
    "strawberry":       (0.22, [(515, 45, 2.00), (445, 30, 1.00)]),
    "beef":             (0.55, [(450, 50, 1.10), (555, 45, 0.90)]),
    "chicken":          (0.06, [(440, 40, 0.05)]),
    "carrot":           (0.15, [(455, 50, 2.30), (500, 30, 0.80)]),
    "butternut_squash": (0.13, [(455, 48, 1.70), (505, 30, 0.50)]),
    "parsnip":          (0.08, [(445, 38, 0.30)]),
    "pea":              (0.25, [(445, 35, 1.50), (650, 45, 1.10)]),
    "sweet_potato":     (0.18, [(455, 50, 2.00), (520, 35, 0.60)]),
}


# Channel responsivity curves: multi-lobe Gaussian fits of standard
# colorimetric observer shapes, clamped at zero and normalized below.
def resp_r(lam):
    return max(0.0, 1.056 * bigauss(lam, 599.8, 37.9, 31.0)
               + 0.362 * bigauss(lam, 442.0, 16.0, 26.7)
               - 0.065 * bigauss(lam, 501.1, 20.4, 26.2))


def resp_g(lam):
    return max(0.0, 0.821 * bigauss(lam, 568.8, 46.9, 40.5)
               + 0.286 * bigauss(lam, 530.9, 16.3, 31.1))


def resp_b(lam):
    return max(0.0, 1.217 * bigauss(lam, 437.0, 11.8, 36.0)
               + 0.681 * bigauss(lam, 459.0, 26.0, 13.8))


def trapezoid(xs, ys):
    acc = 0.0
    for i in range(1, len(xs)):
        acc += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1])
    return acc


def main():
    write_csv(os.path.join(OUT, "water.csv"), [(lam, water_value(lam)) for lam in GRID])

    for name, (base, lobes) in sorted(FLAVORS.items()):
        rows = []
        for lam in GRID:
            v = base + sum(amp * gauss(lam, mu, sigma) for mu, sigma, amp in lobes)
            rows.append((lam, max(0.0, v)))
        write_csv(os.path.join(OUT, "flavors", name + ".csv"), rows)

    for suffix, fn in (("r", resp_r), ("g", resp_g), ("b", resp_b)):
        ys = [fn(lam) for lam in GRID]
        norm = trapezoid(GRID, ys)
        write_csv(os.path.join(OUT, "cones_%s.csv" % suffix),
                  [(lam, y / norm) for lam, y in zip(GRID, ys)])

    print("wrote spectra to", OUT)


if __name__ == "__main__":
    main()
