"""Validate flower reports against docs/report.schema.json.

With --flower and --fixtures, first produces reports for every fixture
directory (plus a generated STATS-mimic database) and validates those too.
"""
import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def produce_reports(flower, fixtures, out):
    sources = [p for p in sorted(pathlib.Path(fixtures).iterdir()) if p.is_dir() and p.name != "packs"]
    stats = out / "stats"
    subprocess.run([flower, "bench", "generate", "--preset", "stats-mimic", "--out", str(stats)],
                   check=True, stdout=subprocess.DEVNULL)
    sources.append(stats)
    reports = []
    for i, source in enumerate(sources):
        report = out / f"report_{i}.json"
        subprocess.run([flower, "analyze", "--source", str(source), "--out", str(report), "--timing"], check=True)
        reports.append(report)
    return reports


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("schema")
    parser.add_argument("reports", nargs="*")
    parser.add_argument("--flower")
    parser.add_argument("--fixtures")
    args = parser.parse_args()

    with open(args.schema) as f:
        schema = json.load(f)
    jsonschema.Draft7Validator.check_schema(schema)

    with tempfile.TemporaryDirectory() as tmp:
        reports = [pathlib.Path(p) for p in args.reports]
        if args.flower:
            reports += produce_reports(args.flower, args.fixtures, pathlib.Path(tmp))
        if not reports:
            sys.exit("no reports to validate")
        for path in reports:
            with open(path) as f:
                jsonschema.validate(json.load(f), schema)
            print(f"{path.name}: valid")


if __name__ == "__main__":
    main()
