"""Held-out homograph accuracy against the majority baseline on an annotated corpus.

The corpus must be in the package TSV/JSONL format (see README). Exits 0
when accuracy strictly exceeds the baseline, 1 otherwise.
"""

import argparse
import json
import sys

from homog2p.corpus import read_corpus_file
from homog2p.metrics import improvement_check
from homog2p.text_norm import load_wordlist_file


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("corpus")
    ap.add_argument("--stopwords")
    ap.add_argument("--test-fraction", type=float, default=0.2)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--normalizer", choices=("total", "distinct"), default="total")
    args = ap.parse_args()

    stop = load_wordlist_file(args.stopwords) if args.stopwords else ()
    report = improvement_check(read_corpus_file(args.corpus), stop, args.test_fraction, args.seed, args.normalizer)
    print(json.dumps(report.to_json(), indent=2))
    sys.exit(0 if report.improved else 1)


if __name__ == "__main__":
    main()
