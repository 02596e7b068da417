"""Certify every network in networks/ and print one line per verdict.

Usage: python3 scripts/run_regression.py [--budget-pairs N] [--skip NAME ...] [--json OUT]
"""
import argparse
import json
from pathlib import Path

from crnid.certify import certify_discriminability, certify_identifiability, constraints_from_decl, CertifyOptions
from crnid.crn import load_crn
from crnid.extrinsic import ExtrinsicSpec, certify_augmented

ROOT = Path(__file__).resolve().parent.parent


def certify_document(doc, opts):
    m = doc.model
    out = []
    for i, j in doc.constraints.exactly_one:
        out.append((f"discriminate k{i},k{j}", certify_discriminability(m, i, j, opts)))
    if not doc.constraints.exactly_one:
        out.append(("identifiability", certify_identifiability(m, constraints_from_decl(doc.constraints, m.r), opts)))
    if doc.extrinsic is not None:
        out.append(("extrinsic", certify_augmented(m, ExtrinsicSpec.from_decl(doc.extrinsic), opts=opts)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--networks", default=str(ROOT / "networks"))
    ap.add_argument("--budget-pairs", type=int, default=1_000_000)
    ap.add_argument("--skip", nargs="*", default=[])
    ap.add_argument("--json", help="write the results to this file")
    args = ap.parse_args()

    opts = CertifyOptions(max_pairs=args.budget_pairs)
    rows = []
    for path in sorted(Path(args.networks).glob("*.crn")):
        if path.stem in args.skip:
            continue
        doc = load_crn(path)
        for task, v in certify_document(doc, opts):
            rows.append({"network": path.stem, "task": task, "verdict": v.status.value, "criterion": v.criterion,
                         "generators": v.num_generators, "variables": v.num_vars,
                         "seconds": round(v.timing_ms / 1000, 2)})
            print(f"{path.stem:14s} {task:22s} {v.status.value:13s} {v.num_generators:6d} gens "
                  f"{v.num_vars:3d} vars {v.timing_ms / 1000:8.2f} s", flush=True)
    if args.json:
        Path(args.json).write_text(json.dumps(rows, indent=2) + "\n")


if __name__ == "__main__":
    main()
