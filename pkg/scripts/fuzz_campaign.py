"""Run order-equivalence fuzz over every isomorphism family and all lemma suites.

    python scripts/fuzz_campaign.py --trials 500 --configs 5 --seed 1
"""
import argparse
import json

from loewner_lab import campaigns as cp


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--configs", type=int, default=5)
    ap.add_argument("--lemma-trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true", help="print the full property records")
    args = ap.parse_args()

    props = []
    for family in cp.FAMILIES:
        props += cp.FuzzConfig(family, args.configs, args.trials, args.seed).run()
    props += cp.run_suite("all", args.lemma_trials, args.seed)

    if args.json:
        print(json.dumps([p.to_json() for p in props], indent=2))
    else:
        for p in props:
            print(f"{'ok  ' if p.passed else 'FAIL'} {p.failures:4d}/{p.trials:<6d} {p.name}")
    raise SystemExit(0 if all(p.passed for p in props) else 1)


if __name__ == "__main__":
    main()
