"""Prompt construction, provider transport and response ingestion for corpus building."""

from __future__ import annotations

import hashlib
import json
import re
import string
import time
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Protocol, Sequence

from homog2p.corpus import CorpusRecord
from homog2p.errors import HomoG2PError, MissingPlaceholderError, PreconditionError, ValidationError
from homog2p.lexicon import HomographInventory, Lexicon
from homog2p.phoneme_repr import MappingTable, PhonemeString, Repr, map_repr, parse_pronunciation
from homog2p.text_norm import normalize, tokenize

HOMOGRAPH_FIELDS = ("homograph", "pronunciation", "fewshot_block")
G2P_FIELDS = ("sentence", "dictionary_hints", "fewshot_block")

DEFAULT_HOMOGRAPH_TEMPLATE = """\
Write {count} natural, varied sentences that use the word "{homograph}" pronounced /{pronunciation}/.
Each sentence must make that reading clear from context and contain the word exactly once.
Examples of sentences with this reading:
{fewshot_block}
Return one sentence per line, without numbering.
"""

DEFAULT_G2P_TEMPLATE = """\
Transcribe the sentence into phonemes, one group per word, words separated by spaces.
Dictionary pronunciations for some of the words:
{dictionary_hints}
Examples:
{fewshot_block}
Sentence: {sentence}
Phonemes:"""


@dataclass(frozen=True)
class PromptTemplate:
    """Text with ``{name}`` placeholders; ``{{`` and ``}}`` are literal braces."""

    body: str
    optional: frozenset[str] = frozenset()

    def fields(self) -> list[str]:
        names = []
        for _, name, spec, conv in string.Formatter().parse(self.body):
            if name is None:
                continue
            if not name.isidentifier() or spec or conv:
                raise ValidationError(f"unsupported placeholder {{{name}}}")
            names.append(name)
        return names

    def render(self, required: Iterable[str], values: Mapping[str, str]) -> str:
        names = self.fields()
        for name in set(names):
            if name not in values:
                raise MissingPlaceholderError(f"template placeholder {{{name}}} has no value")
            if names.count(name) > 1 and name not in self.optional:
                raise ValidationError(f"placeholder {{{name}}} appears more than once")
        for name in required:
            if name not in names and name not in self.optional:
                raise MissingPlaceholderError(f"template lacks required placeholder {{{name}}}")
        return self.body.format_map({k: values[k] for k in names})


def load_template(path, optional: Iterable[str] = ()) -> PromptTemplate:
    with open(path, encoding="utf-8") as fh:
        return PromptTemplate(fh.read(), frozenset(optional))


def fewshot_block(exemplars: Sequence) -> str:
    lines = []
    for i, ex in enumerate(exemplars, 1):
        if isinstance(ex, str):
            lines.append(f"{i}. {ex}")
        else:
            sentence, phonemes = ex
            lines.append(f"{i}. {sentence} => {phonemes}")
    return "\n".join(lines)


def render_homograph_prompt(
    tmpl: PromptTemplate,
    homograph: str,
    pronunciation: PhonemeString,
    fewshot: Sequence[str],
    count: int = 5,
) -> str:
    if not fewshot:
        raise PreconditionError("homograph prompts need at least one few-shot exemplar")
    values = {
        "homograph": homograph,
        "pronunciation": "".join(pronunciation.tokens),
        "fewshot_block": fewshot_block(fewshot),
        "count": str(count),
        "dictionary_hints": "",
    }
    return tmpl.render(HOMOGRAPH_FIELDS, values)


def dictionary_hints(sentence: str, lexicon: Lexicon) -> str:
    """``word: pron1 / pron2`` for each distinct in-lexicon token, in sentence order."""
    lines, seen = [], set()
    for tok in tokenize(normalize(sentence)):
        if tok in seen:
            continue
        seen.add(tok)
        prons = lexicon.lookup(tok)
        if prons:
            lines.append(f"{tok}: " + " / ".join("".join(p.tokens) for p in prons))
    return "\n".join(lines)


def render_g2p_prompt(tmpl: PromptTemplate, sentence: str, lexicon: Lexicon, fewshot: Sequence = ()) -> str:
    values = {
        "sentence": normalize(sentence),
        "dictionary_hints": dictionary_hints(sentence, lexicon),
        "fewshot_block": fewshot_block(fewshot),
    }
    return tmpl.render(("sentence", "dictionary_hints"), values)


@dataclass(frozen=True)
class Request:
    id: int
    homograph: str
    pronunciation: PhonemeString
    prompt: str
    params: Mapping[str, object] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "homograph": self.homograph,
            "pronunciation": self.pronunciation.serialize(),
            "prompt": self.prompt,
            "params": dict(self.params),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Request":
        return cls(int(obj["id"]), obj["homograph"], PhonemeString.parse(obj["pronunciation"]),
                   obj["prompt"], obj.get("params") or {})


def split_evenly(total: int, parts: int) -> list[int]:
    """``total`` split into ``parts`` counts that differ by at most one."""
    q, r = divmod(total, parts)
    return [q + (i < r) for i in range(parts)]


def schedule_requests(
    inventory: HomographInventory,
    sentences_per_homograph: int,
    fewshot: Mapping[tuple[str, PhonemeString], Sequence[str]],
    tmpl: PromptTemplate = PromptTemplate(DEFAULT_HOMOGRAPH_TEMPLATE),
    sentences_per_request: int = 5,
    params: Mapping[str, object] | None = None,
) -> list[Request]:
    """Requests spreading the sentence budget evenly over each homograph's pronunciations.

    Each request asks for up to ``sentences_per_request`` sentences;
    requested sentence counts per pronunciation differ by at most one.
    """
    if sentences_per_request < 1:
        raise ValidationError("sentences_per_request must be positive")
    out = []
    for h in sorted(inventory.items):
        prons = inventory.pronunciations(h)
        for p, n in zip(prons, split_evenly(sentences_per_homograph, len(prons))):
            shots = fewshot.get((h, p), ())
            while n > 0:
                k = min(n, sentences_per_request)
                prompt = render_homograph_prompt(tmpl, h, p, shots, count=k)
                out.append(Request(len(out), h, p, prompt, dict(params or {}, count=k)))
                n -= k
    return out


def load_fewshot(stream: Iterable[str]) -> dict[tuple[str, PhonemeString], list[str]]:
    """TSV ``homograph<TAB>pronunciation<TAB>sentence``."""
    out: dict = {}
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ValidationError(f"few-shot line {lineno}: expected three columns")
        key = (normalize(cols[0]), parse_pronunciation(cols[1]))
        out.setdefault(key, []).append(normalize(cols[2]))
    return out


class AnnotationProvider(Protocol):
    def complete(self, prompt: str, params: Mapping[str, object] | None = None) -> str: ...


def request_key(prompt: str, params: Mapping[str, object] | None = None) -> str:
    blob = json.dumps({"prompt": prompt, "params": dict(params or {})}, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class ProviderError(HomoG2PError):
    pass


class ReplayProvider:
    """Answers from a fixture mapping request key -> response text."""

    def __init__(self, fixture: Mapping[str, str]):
        self.fixture = dict(fixture)

    @classmethod
    def from_file(cls, path) -> "ReplayProvider":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def complete(self, prompt, params=None):
        try:
            return self.fixture[request_key(prompt, params)]
        except KeyError:
            raise ProviderError("no recorded response for this request") from None


class HttpProvider:
    """POSTs ``{"prompt", "params"}`` as JSON and reads ``{"text"}`` back.

    Failed attempts are retried with exponential backoff.
    """

    def __init__(self, url: str, timeout: float = 60.0, attempts: int = 3, backoff: float = 1.0,
                 headers: Mapping[str, str] | None = None, sleep=time.sleep):
        self.url = url
        self.timeout = timeout
        self.attempts = attempts
        self.backoff = backoff
        self.headers = {"Content-Type": "application/json", **(headers or {})}
        self._sleep = sleep

    def complete(self, prompt, params=None):
        data = json.dumps({"prompt": prompt, "params": dict(params or {})}).encode("utf-8")
        last = None
        for attempt in range(self.attempts):
            if attempt:
                self._sleep(self.backoff * 2 ** (attempt - 1))
            req = urllib.request.Request(self.url, data=data, headers=self.headers, method="POST")
            try:
                with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                    return json.loads(resp.read().decode("utf-8"))["text"]
            except (urllib.error.URLError, TimeoutError, OSError, ValueError, KeyError) as exc:
                last = exc
        raise ProviderError(f"provider failed after {self.attempts} attempts: {last}")


def run_requests(provider: AnnotationProvider, requests: Sequence[Request], concurrency: int = 4) -> list[tuple[Request, str | Exception]]:
    """Issue requests concurrently; results come back ordered by request id."""

    def call(req):
        try:
            return req, provider.complete(req.prompt, req.params)
        except HomoG2PError as exc:
            return req, exc

    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        done = list(pool.map(call, requests))
    return sorted(done, key=lambda pair: pair[0].id)


_LIST_PREFIX = re.compile(r"^\s*(?:[-*•]|\(?[0-9۰-۹]+[.)\-:]|[0-9۰-۹]+\s*-)\s*")


def candidate_sentences(response: str) -> list[str]:
    """Split a response into sentences: one per non-empty line, list markers removed."""
    out = []
    for line in response.splitlines():
        line = _LIST_PREFIX.sub("", line).strip().strip("\"'“”")
        if line:
            out.append(normalize(line))
    return out


@dataclass(frozen=True)
class Reject:
    request_id: int
    line: int
    text: str
    reason: str

    def to_json(self) -> dict:
        return {"request_id": self.request_id, "line": self.line, "text": self.text, "reason": self.reason}


Phonemizer = Callable[[str], PhonemeString]


def ingest_responses(
    responses: Sequence[tuple[Request, str | Exception]],
    phonemize: Phonemizer,
    table: MappingTable | None = None,
    id_prefix: str = "llm",
) -> tuple[list[CorpusRecord], list[Reject]]:
    """Turn provider responses into validated corpus records.

    A candidate is kept only if it contains the target homograph exactly
    once. ``phonemize`` supplies the sentence's R1 phonemes; the group at the
    homograph is then set to the requested pronunciation. Rejects never
    abort ingestion.
    """
    records, rejects = [], []
    for req, resp in sorted(responses, key=lambda pair: pair[0].id):
        if isinstance(resp, Exception):
            rejects.append(Reject(req.id, 0, "", f"provider error: {resp}"))
            continue
        for lineno, sent in enumerate(candidate_sentences(resp), 1):
            toks = tokenize(sent)
            hits = toks.count(req.homograph)
            if hits == 0:
                rejects.append(Reject(req.id, lineno, sent, "homograph missing"))
                continue
            if hits > 1:
                rejects.append(Reject(req.id, lineno, sent, "homograph occurs more than once"))
                continue
            try:
                ps = phonemize(sent)
                if len(ps.words) != len(toks):
                    raise ValidationError(f"phonemizer returned {len(ps.words)} words for {len(toks)} tokens")
                words = list(ps.words)
                words[toks.index(req.homograph)] = req.pronunciation.words[0]
                r1 = PhonemeString(tuple(words), Repr.R1)
                rec = CorpusRecord(
                    grapheme=sent,
                    phoneme_r1=r1,
                    phoneme_r2=None if table is None else map_repr(r1, table, Repr.R2),
                    homograph=req.homograph,
                    pronunciation=req.pronunciation,
                    source="llm",
                    id=f"{id_prefix}-{len(records):06d}",
                )
            except HomoG2PError as exc:
                rejects.append(Reject(req.id, lineno, sent, f"invalid record: {exc}"))
                continue
            records.append(rec)
    return records, rejects


def engine_phonemizer(engine) -> Phonemizer:
    return lambda sentence: engine.phonemize(sentence).phonemes


def provider_phonemizer(
    provider: AnnotationProvider,
    tmpl: PromptTemplate,
    lexicon: Lexicon,
    fewshot: Sequence = (),
    table: MappingTable | None = None,
    source_repr: Repr = Repr.R1,
) -> Phonemizer:
    """Phonemize through a provider; the reply is read as one-character tokens per word.

    When the provider answers in the other representation, ``table`` maps it
    back to R1.
    """

    def run(sentence: str) -> PhonemeString:
        reply = provider.complete(render_g2p_prompt(tmpl, sentence, lexicon, fewshot))
        lines = [ln for ln in reply.strip().splitlines() if ln.strip()]
        ps = PhonemeString.from_compact(lines[-1] if lines else "", source_repr)
        if source_repr is not Repr.R1:
            if table is None:
                raise ValidationError("a mapping table is needed to map provider output to R1")
            ps = map_repr(ps, table, Repr.R1)
        return ps

    return run
