#!/usr/bin/env python3
"""Fetch the benchmark datasets and write them as headered CSV files.

Each dataset is taken from the UCI repository when it is reachable. Otherwise
the script falls back to copies bundled in PyPI packages (KEEL tables in
keel-ds, the red wine table in dataprep), fetched with `pip download`.

Usage: prepare_datasets.py [--out DIR] [--cache DIR] [--offline]
"""

import argparse
import csv
import glob
import io
import os
import subprocess
import sys
import urllib.request
import zipfile

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

TIC_TAC_TOE_COLUMNS = [
    "top_left", "top_middle", "top_right",
    "middle_left", "middle_middle", "middle_right",
    "bottom_left", "bottom_middle", "bottom_right", "class",
]
IRIS_COLUMNS = ["sepal_length", "sepal_width", "petal_length", "petal_width", "class"]
SPAMBASE_COLUMNS = [f"f{i}" for i in range(57)] + ["class"]

PACKAGES = {
    "keel": ("keel-ds==0.2.5", "keel_ds-*.whl"),
    "dataprep": ("dataprep==0.4.5", "dataprep-*.whl"),
}


def fetch(url, timeout=30):
    with urllib.request.urlopen(url, timeout=timeout) as response:
        return response.read().decode("utf-8")


def wheel(cache, name):
    spec, pattern = PACKAGES[name]
    found = glob.glob(os.path.join(cache, pattern))
    if not found:
        cmd = [sys.executable, "-m", "pip", "download", "--no-deps", "--timeout", "120",
               "--retries", "5", "-d", cache, spec]
        subprocess.run(cmd, check=True, stdout=subprocess.DEVNULL)
        found = glob.glob(os.path.join(cache, pattern))
    if not found:
        raise RuntimeError(f"pip download of {spec} produced no wheel")
    return zipfile.ZipFile(found[0])


def keel_rows(cache, name):
    text = wheel(cache, "keel").read(f"keel_ds/data/balanced/raw/{name}.dat").decode("utf-8")
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        rows.append([cell.strip() for cell in line.split(",")])
    return rows


def plain_rows(text, delimiter=","):
    return [[c.strip() for c in row] for row in csv.reader(io.StringIO(text), delimiter=delimiter) if row]


def tic_tac_toe(cache, offline):
    if not offline:
        try:
            return "UCI", plain_rows(fetch(f"{UCI}/tic-tac-toe/tic-tac-toe.data"))
        except Exception:
            pass
    return "keel-ds", keel_rows(cache, "tic-tac-toe")


def iris(cache, offline):
    if not offline:
        try:
            return "UCI", plain_rows(fetch(f"{UCI}/iris/iris.data"))
        except Exception:
            pass
    return "keel-ds", keel_rows(cache, "iris")


def spambase(cache, offline):
    if not offline:
        try:
            return "UCI", plain_rows(fetch(f"{UCI}/spambase/spambase.data"))
        except Exception:
            pass
    return "keel-ds", keel_rows(cache, "spambase")


def wine_red(cache, offline):
    if not offline:
        try:
            rows = plain_rows(fetch(f"{UCI}/wine-quality/winequality-red.csv"), delimiter=";")
            return "UCI", rows[1:]
        except Exception:
            pass
    text = wheel(cache, "dataprep").read("dataprep/datasets/data/wine-quality-red.csv").decode("utf-8")
    return "dataprep", plain_rows(text)[1:]


WINE_COLUMNS = [
    "fixed_acidity", "volatile_acidity", "citric_acid", "residual_sugar", "chlorides",
    "free_sulfur_dioxide", "total_sulfur_dioxide", "density", "pH", "sulphates", "alcohol",
    "quality",
]

DATASETS = [
    ("tic-tac-toe", tic_tac_toe, TIC_TAC_TOE_COLUMNS),
    ("iris", iris, IRIS_COLUMNS),
    ("spambase", spambase, SPAMBASE_COLUMNS),
    ("wine-quality-red", wine_red, WINE_COLUMNS),
]


def main():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=os.path.join(root, "data"))
    parser.add_argument("--cache", default=os.path.join(root, "data", ".cache"))
    parser.add_argument("--offline", action="store_true", help="skip the UCI download attempt")
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    os.makedirs(args.cache, exist_ok=True)

    failed = 0
    for name, loader, columns in DATASETS:
        try:
            source, rows = loader(args.cache, args.offline)
        except Exception as exc:  # keep going so the other datasets still land
            print(f"{name}: FAILED ({exc})", file=sys.stderr)
            failed += 1
            continue
        rows = [r for r in rows if len(r) == len(columns)]
        path = os.path.join(args.out, f"{name}.csv")
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            writer.writerows(rows)
        print(f"{name}: {len(rows)} rows from {source} -> {path}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
