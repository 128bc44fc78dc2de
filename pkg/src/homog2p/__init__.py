"""Homograph-aware grapheme-to-phoneme conversion with a statistical context database."""

__version__ = "0.1.0"

from homog2p.context_db import (
    DB_FORMAT_VERSION,
    ContextDatabase,
    build_db,
    load_db,
    load_db_file,
    save_db,
    save_db_file,
)
from homog2p.corpus import CorpusRecord, read_corpus, read_corpus_file, write_corpus, write_corpus_file
from homog2p.disambiguator import ScoreReport, choose, score
from homog2p.engine import EngineConfig, G2PEngine, PhonemizationResult, SentenceError
from homog2p.lexicon import HomographInventory, Lexicon, extract_homographs, load_lexicon, load_lexicon_file
from homog2p.metrics import bench, per
from homog2p.phoneme_repr import MappingTable, PhonemeString, Repr, map_repr
from homog2p.text_norm import content_words, load_wordlist, load_wordlist_file, normalize, tokenize

__all__ = [
    "DB_FORMAT_VERSION",
    "ContextDatabase",
    "CorpusRecord",
    "EngineConfig",
    "G2PEngine",
    "HomographInventory",
    "Lexicon",
    "MappingTable",
    "PhonemeString",
    "PhonemizationResult",
    "Repr",
    "ScoreReport",
    "SentenceError",
    "bench",
    "build_db",
    "choose",
    "content_words",
    "extract_homographs",
    "load_db",
    "load_db_file",
    "load_lexicon",
    "load_lexicon_file",
    "load_wordlist",
    "load_wordlist_file",
    "map_repr",
    "normalize",
    "per",
    "read_corpus",
    "read_corpus_file",
    "save_db",
    "save_db_file",
    "score",
    "tokenize",
    "write_corpus",
    "write_corpus_file",
]
