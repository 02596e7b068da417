"""Compare generator feed orders (minors first versus lifts first) on the certifiable networks.

Usage: python3 scripts/feed_order_benchmark.py [NAME ...]
"""
import sys
from pathlib import Path

from crnid.certify import CertifyOptions, certify_identifiability
from crnid.crn import load_crn

ROOT = Path(__file__).resolve().parent.parent
DEFAULT = ["r1", "r3", "r4", "r5", "r7", "r6"]


def main(names):
    print(f"{'network':10s} {'priority':12s} {'verdict':12s} {'pairs':>8s} {'seconds':>9s}")
    for name in names or DEFAULT:
        m = load_crn(ROOT / "networks" / f"{name}.crn").model
        for priority in ("minors_first", "lifts_first"):
            v = certify_identifiability(m, opts=CertifyOptions(priority=priority, max_seconds=600))
            pairs = v.stats.pairs_processed if v.stats else 0
            print(f"{name:10s} {priority:12s} {v.status.value:12s} {pairs:8d} {v.timing_ms / 1000:9.2f}", flush=True)


if __name__ == "__main__":
    main(sys.argv[1:])
