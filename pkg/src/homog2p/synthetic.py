"""Seeded synthetic lexicons and corpora for tests, benchmarks and scripts.

Synthetic homograph sentences draw part of their context from cue words
tied to the gold pronunciation, so the context carries real but noisy signal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from homog2p.corpus import CorpusRecord
from homog2p.lexicon import HomographInventory, Lexicon, extract_homographs
from homog2p.phoneme_repr import MappingTable, PhonemeString, Repr, map_repr

PHONEMES = tuple("aeiouAbdfghjklmnprstvxzSCZ")
LETTERS = "abcdefghijklmnopqrstuvwxyz"
REFERENCE_VARIANTS = {2: 257, 3: 21, 4: 7}


def _word(rng: random.Random, lo=3, hi=8) -> str:
    return "".join(rng.choice(LETTERS) for _ in range(rng.randint(lo, hi)))


def _pron(rng: random.Random, lo=2, hi=7) -> PhonemeString:
    return PhonemeString.word([rng.choice(PHONEMES) for _ in range(rng.randint(lo, hi))])


def synthetic_lexicon(n_entries: int, variants: dict[int, int] = REFERENCE_VARIANTS, seed: int = 0) -> Lexicon:
    """``n_entries`` words; the first ones are homographs with the given variant histogram."""
    rng = random.Random(seed)
    n_hom = sum(variants.values())
    if n_hom > n_entries:
        raise ValueError("more homographs than entries")
    words: list[str] = []
    seen = set()
    while len(words) < n_entries:
        w = _word(rng)
        if w not in seen:
            seen.add(w)
            words.append(w)
    entries = {}
    it = iter(words)
    for k, count in sorted(variants.items()):
        for _ in range(count):
            prons: list[PhonemeString] = []
            while len(prons) < k:
                p = _pron(rng)
                if p not in prons:
                    prons.append(p)
            entries[next(it)] = prons
    for w in it:
        entries[w] = [_pron(rng)]
    return Lexicon(entries)


@dataclass
class SyntheticWorld:
    lexicon: Lexicon
    inventory: HomographInventory
    plain_words: list[str]
    stopwords: frozenset[str]
    cues: dict  # (homograph, pron) -> list of cue words

    def pron(self, word: str) -> PhonemeString:
        return self.lexicon.lookup(word)[0]


def make_world(
    n_entries: int = 2000,
    variants: dict[int, int] | None = None,
    n_stopwords: int = 20,
    cues_per_pron: int = 6,
    seed: int = 0,
) -> SyntheticWorld:
    variants = REFERENCE_VARIANTS if variants is None else variants
    lex = synthetic_lexicon(n_entries, variants, seed)
    inv = extract_homographs(lex)
    rng = random.Random(f"world:{seed}")
    plain = [w for w, p in lex.items() if len(p) == 1]
    stop = frozenset(rng.sample(plain, min(n_stopwords, len(plain) // 4)))
    plain = [w for w in plain if w not in stop]
    cues = {}
    for h in inv.items:
        for p in inv.pronunciations(h):
            cues[(h, p)] = rng.sample(plain, cues_per_pron)
    return SyntheticWorld(lex, inv, plain, stop, cues)


def sentence_record(world: SyntheticWorld, words: list[str], rid: str, homograph=None, gold=None,
                    source="other", table: MappingTable | None = None) -> CorpusRecord:
    groups = []
    for w in words:
        groups.append(gold.words[0] if (w == homograph and gold is not None) else world.pron(w).words[0])
    r1 = PhonemeString(tuple(groups), Repr.R1)
    return CorpusRecord(
        grapheme=" ".join(words),
        phoneme_r1=r1,
        phoneme_r2=None if table is None else map_repr(r1, table, Repr.R2),
        homograph=homograph,
        pronunciation=gold,
        source=source,
        id=rid,
    )


def homograph_sentences(
    world: SyntheticWorld,
    per_pron: int,
    length: tuple[int, int] = (8, 15),
    cue_rate: float = 0.3,
    stop_rate: float = 0.2,
    seed: int = 0,
    homographs=None,
    table: MappingTable | None = None,
) -> list[CorpusRecord]:
    """``per_pron`` annotated sentences for every pronunciation of every homograph (balanced)."""
    rng = random.Random(f"hom:{seed}")
    stop = sorted(world.stopwords)
    out = []
    for h in homographs if homographs is not None else sorted(world.inventory.items):
        for p in world.inventory.pronunciations(h):
            cue = world.cues[(h, p)]
            for _ in range(per_pron):
                n = rng.randint(*length)
                words = []
                for _ in range(n - 1):
                    r = rng.random()
                    if r < cue_rate:
                        words.append(rng.choice(cue))
                    elif r < cue_rate + stop_rate:
                        words.append(rng.choice(stop))
                    else:
                        words.append(rng.choice(world.plain_words))
                words.insert(rng.randrange(n), h)
                out.append(sentence_record(world, words, f"s{seed}-{len(out)}", h, p, "human", table))
    return out


def plain_sentences(world: SyntheticWorld, count: int, length=(2, 5), seed: int = 0,
                    table: MappingTable | None = None) -> list[CorpusRecord]:
    rng = random.Random(f"plain:{seed}")
    return [
        sentence_record(world, [rng.choice(world.plain_words) for _ in range(rng.randint(*length))],
                        f"p{seed}-{i}", source="commonvoice", table=table)
        for i in range(count)
    ]


def identity_table() -> MappingTable:
    return MappingTable.identity(PHONEMES)


def shifted_table() -> MappingTable:
    """A non-identity bijection; ``e`` stays ``e`` so Ezafe markers remain valid."""
    return MappingTable(tuple((s, s if s == "e" else f"_{s}") for s in PHONEMES))
