#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Convert the raw UCI Adult and ProPublica COMPAS files into the headered
CSVs under data/ that the pipeline configs point at.

The raw files ship with the `responsibly` wheel (responsibly/dataset/...),
or can be fetched from their original sources. Usage:

    python3 tools/prepare_datasets.py --adult path/to/adult.data \
        --compas path/to/compas-scores-two-years.csv --out data/
"""
import argparse
import csv
import os

ADULT_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education_num",
    "marital_status", "occupation", "relationship", "race", "sex",
    "capital_gain", "capital_loss", "hours_per_week", "native_country",
    "income",
]
ADULT_KEEP = [
    "age", "workclass", "education_num", "marital_status", "occupation",
    "relationship", "race", "sex", "capital_gain", "capital_loss",
    "hours_per_week", "native_country", "income",
]

COMPAS_KEEP = [
    "sex", "age", "race", "juv_fel_count", "juv_misd_count",
    "juv_other_count", "priors_count", "c_charge_degree", "two_year_recid",
]


def prepare_adult(src, dst):
    kept = 0
    with open(src, newline="") as fin, open(dst, "w", newline="") as fout:
        out = csv.writer(fout, lineterminator="\n")
        out.writerow(ADULT_KEEP)
        for raw in csv.reader(fin, skipinitialspace=True):
            if len(raw) != len(ADULT_COLUMNS):
                continue
            rec = dict(zip(ADULT_COLUMNS, (v.strip() for v in raw)))
            if any(v == "?" for v in rec.values()):
                continue
            rec["income"] = rec["income"].rstrip(".")
            if rec["native_country"] != "United-States":
                rec["native_country"] = "Other"
            out.writerow([rec[c] for c in ADULT_KEEP])
            kept += 1
    return kept


def prepare_compas(src, dst):
    # Standard ProPublica filtering.
    kept = 0
    with open(src, newline="") as fin, open(dst, "w", newline="") as fout:
        out = csv.writer(fout, lineterminator="\n")
        out.writerow(COMPAS_KEEP)
        for rec in csv.DictReader(fin):
            try:
                days = int(rec["days_b_screening_arrest"])
            except ValueError:
                continue
            if not -30 <= days <= 30:
                continue
            if rec["is_recid"] == "-1" or rec["c_charge_degree"] == "O":
                continue
            if rec["score_text"] == "N/A":
                continue
            race = rec["race"]
            if race not in ("African-American", "Caucasian", "Hispanic"):
                race = "Other"
            row = dict(rec)
            row["race"] = race
            row["two_year_recid"] = "yes" if rec["two_year_recid"] == "1" else "no"
            out.writerow([row[c] for c in COMPAS_KEEP])
            kept += 1
    return kept


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--adult", required=True)
    ap.add_argument("--compas", required=True)
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    n_adult = prepare_adult(args.adult, os.path.join(args.out, "adult.csv"))
    n_compas = prepare_compas(args.compas, os.path.join(args.out, "compas.csv"))
    print(f"adult: {n_adult} rows, compas: {n_compas} rows")


if __name__ == "__main__":
    main()
