#!/usr/bin/env python3
"""Builds data/country_grid.csv from a GeoNames-derived city table.

Each city is snapped to the nearest 0.5 degree grid point; a grid point is
assigned the country that contributes the most cities to it (ties broken by
ISO code). Input columns: lat,lon,...,cc (e.g. rg_cities1000.csv from the
reverse_geocoder package, GeoNames CC-BY).
"""
import csv
import sys
from collections import Counter, defaultdict


def snap(v):
    return round(float(v) * 2) / 2


def main(src, dst):
    cells = defaultdict(Counter)
    with open(src, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            if not row["cc"]:
                continue
            lat, lon = snap(row["lat"]), snap(row["lon"])
            if lon == 180.0:
                lon = -180.0
            cells[(lat, lon)][row["cc"]] += 1
    with open(dst, "w", newline="", encoding="utf-8") as f:
        f.write("lat,lon,iso2\n")
        for (lat, lon) in sorted(cells):
            counts = cells[(lat, lon)]
            best = max(counts.values())
            iso = min(cc for cc, n in counts.items() if n == best)
            f.write(f"{lat:.1f},{lon:.1f},{iso}\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
