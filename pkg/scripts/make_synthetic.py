"""Write a synthetic lexicon, corpora, stopwords and an augmentation plan.

The output directory can be fed straight to the ``homog2p`` CLI, e.g.::

    python3 scripts/make_synthetic.py out/
    homog2p build-db --corpus out/train.tsv --lexicon out/lexicon.tsv \
        --stopwords out/stopwords.txt --out out/ctx.db
"""

import argparse
import json
from pathlib import Path

from homog2p.corpus import write_corpus_file
from homog2p.lexicon import dump_lexicon_tsv
from homog2p.synthetic import homograph_sentences, make_world, plain_sentences


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", type=Path)
    ap.add_argument("--entries", type=int, default=20_000)
    ap.add_argument("--train-per-pron", type=int, default=10)
    ap.add_argument("--test-per-pron", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    world = make_world(args.entries, seed=args.seed)
    train = homograph_sentences(world, args.train_per_pron, seed=args.seed) + plain_sentences(world, 200, seed=args.seed)
    test = homograph_sentences(world, args.test_per_pron, length=(14, 16), seed=args.seed + 1)

    (out / "lexicon.tsv").write_text(dump_lexicon_tsv(world.lexicon), encoding="utf-8")
    (out / "stopwords.txt").write_text("\n".join(sorted(world.stopwords)) + "\n", encoding="utf-8")
    write_corpus_file(train, out / "train.tsv")
    write_corpus_file(test, out / "bench.tsv")
    syn = [f"{w}\t{w}x\ts a" for w in world.plain_words[:200]]
    (out / "synonyms.tsv").write_text("\n".join(syn) + "\n", encoding="utf-8")
    plan = {"synonyms": "synonyms.tsv", "synonym_max_variants": 1, "reorder_copies": 1, "concat_copies": 1}
    (out / "plan.json").write_text(json.dumps(plan, indent=2) + "\n", encoding="utf-8")
    print(json.dumps({
        "lexicon_entries": len(world.lexicon),
        "homographs": len(world.inventory),
        "variant_histogram": world.inventory.variant_histogram(),
        "train_sentences": len(train),
        "bench_sentences": len(test),
    }, indent=2))


if __name__ == "__main__":
    main()
