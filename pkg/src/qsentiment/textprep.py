"""Text cleaning, tokenisation, stop-word filtering and count vectorisation."""
from __future__ import annotations

import csv
import io
import logging
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import regex

from .errors import ConfigError, DatasetError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Rule:
    name: str
    pattern: regex.Pattern
    replacement: str = " "


def compile_rules(specs: Iterable[Sequence[str]]) -> tuple[Rule, ...]:
    """Compile ``(name, pattern[, replacement])`` triples, failing fast on bad patterns."""
    rules = []
    for spec in specs:
        name, pattern, *rest = spec
        try:
            compiled = regex.compile(pattern)
        except regex.error as exc:
            raise ConfigError(f"cleaning rule {name!r}: invalid pattern {pattern!r}: {exc}") from exc
        rules.append(Rule(name, compiled, rest[0] if rest else " "))
    return tuple(rules)


# URLs and mentions go first: their bodies contain punctuation the later rules would split.
DEFAULT_RULE_SPECS = (
    ("url", r"(?:https?://|www\.)\S*"),
    ("mention", r"@\w+"),
    ("punctuation", r"[\p{P}\p{S}]+"),
    ("digits", r"\p{N}+"),
    ("whitespace", r"\s+"),
)
DEFAULT_RULES = compile_rules(DEFAULT_RULE_SPECS)


def clean_text(raw: str, rules: Sequence[Rule] = DEFAULT_RULES) -> str:
    """NFC-normalise, apply ``rules`` in order, and trim.

    >>> clean_text("Good!! movie 123")
    'Good movie'
    """
    text = unicodedata.normalize("NFC", raw)
    for rule in rules:
        text = rule.pattern.sub(rule.replacement, text)
    return text.strip()


def tokenize(text: str) -> list[str]:
    return text.split()


def _is_latin(token):
    return all(ord(ch) < 0x250 for ch in token)


def load_stopwords(path) -> frozenset[str]:
    """One term per line, UTF-8; blank lines and ``#`` comments are skipped."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError(f"stop-word file not found: {path}") from exc
    except UnicodeDecodeError as exc:
        raise ConfigError(f"stop-word file is not UTF-8: {path}") from exc
    terms = set()
    for line in raw.splitlines():
        line = unicodedata.normalize("NFC", line.strip())
        if line and not line.startswith("#"):
            terms.add(line.casefold() if _is_latin(line) else line)
    return frozenset(terms)


def builtin_stopwords(language: str) -> frozenset[str]:
    names = {"english": "stopwords_en.txt", "bengali": "stopwords_bn.txt"}
    if language not in names:
        raise ConfigError(f"no bundled stop-word list for {language!r}; choose from {sorted(names)}")
    with resources.as_file(resources.files("qsentiment") / "data" / names[language]) as p:
        return load_stopwords(p)


def remove_stopwords(tokens: Iterable[str], stops: frozenset[str]) -> list[str]:
    """Drop stop words: case-insensitively for Latin-script tokens, exact match otherwise."""
    out = []
    for tok in tokens:
        key = tok.casefold() if _is_latin(tok) else tok
        if key not in stops:
            out.append(tok)
    return out


def encode_labels(labels: Sequence[str]):
    """Map the lexicographically smaller class to 0 and the larger to 1."""
    classes = sorted(set(labels))
    if len(classes) != 2:
        raise DatasetError(f"expected exactly two classes, found {len(classes)}: {classes}")
    mapping = {classes[0]: 0, classes[1]: 1}
    return np.array([mapping[lab] for lab in labels], dtype=np.int64), mapping


class Vocabulary:
    """Sorted term -> column index map built from training documents."""

    def __init__(self, terms: Iterable[str]):
        self.terms = tuple(sorted(set(terms)))
        self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.index

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.terms == other.terms

    def __repr__(self):
        return f"Vocabulary({len(self)} terms)"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["term", "index"])
        for i, t in enumerate(self.terms):
            w.writerow([t, i])
        return buf.getvalue()

    def save(self, path):
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    @classmethod
    def from_csv(cls, text: str) -> "Vocabulary":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["term", "index"]:
            raise DatasetError("vocabulary CSV must have header 'term,index'")
        terms = [None] * (len(rows) - 1)
        for term, idx in rows[1:]:
            terms[int(idx)] = term
        vocab = cls(terms)
        if list(vocab.terms) != terms:
            raise DatasetError("vocabulary CSV indices are not in lexicographic term order")
        return vocab

    @classmethod
    def load(cls, path):
        return cls.from_csv(Path(path).read_text(encoding="utf-8"))


def build_vocabulary(corpus: Iterable[Sequence[str]]) -> Vocabulary:
    terms = set()
    n_docs = 0
    for doc in corpus:
        n_docs += 1
        terms.update(doc)
    if not terms:
        raise DatasetError(f"cannot build a vocabulary from {n_docs} documents with no tokens")
    return Vocabulary(terms)


def vectorize(tokens: Sequence[str], vocab: Vocabulary) -> np.ndarray:
    """Term counts; tokens missing from ``vocab`` are ignored."""
    counts = np.zeros(len(vocab), dtype=np.int64)
    for tok in tokens:
        i = vocab.index.get(tok)
        if i is not None:
            counts[i] += 1
    return counts


def vectorize_corpus(corpus: Sequence[Sequence[str]], vocab: Vocabulary) -> np.ndarray:
    out = np.zeros((len(corpus), len(vocab)), dtype=np.int64)
    for r, doc in enumerate(corpus):
        out[r] = vectorize(doc, vocab)
    return out


@dataclass(frozen=True)
class LanguageProfile:
    """Per-language preprocessing settings."""

    name: str
    stopwords: frozenset
    rules: tuple = DEFAULT_RULES
    lowercase: bool = False

    def tokens(self, cleaned: str) -> list[str]:
        if self.lowercase:
            cleaned = cleaned.casefold()
        return remove_stopwords(tokenize(cleaned), self.stopwords)

    def process(self, raw: str) -> list[str]:
        return self.tokens(clean_text(raw, self.rules))


def language_profile(name: str, stopwords_path=None, rules=None) -> LanguageProfile:
    stops = load_stopwords(stopwords_path) if stopwords_path else builtin_stopwords(name)
    return LanguageProfile(
        name=name,
        stopwords=stops,
        rules=DEFAULT_RULES if rules is None else compile_rules(rules),
        lowercase=name == "english",
    )
