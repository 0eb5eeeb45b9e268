import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsentiment import textprep
from qsentiment.errors import ConfigError, DatasetError


@pytest.mark.parametrize("raw, expected", [
    ("Good!! movie 123", "Good movie"),
    ("", ""),
    ("@user http://a.b nice", "nice"),
    ("see www.example.com/x?y=1 now", "see now"),
    ("tabs\tand\n\nnewlines", "tabs and newlines"),
    ("খুব ভালো! ১২৩", "খুব ভালো"),
])
def test_clean_examples(raw, expected):
    assert textprep.clean_text(raw) == expected


def test_clean_normalises_to_nfc():
    decomposed = "café"
    assert textprep.clean_text(decomposed) == "café"


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=80))
def test_clean_is_idempotent(raw):
    once = textprep.clean_text(raw)
    assert textprep.clean_text(once) == once


def test_invalid_rule_rejected_at_compile_time():
    with pytest.raises(ConfigError, match="bad"):
        textprep.compile_rules([("bad", "([unclosed")])


def test_custom_rules_run_in_order():
    rules = textprep.compile_rules([("shout", r"!+", " bang "), ("ws", r"\s+")])
    assert textprep.clean_text("wow!!", rules) == "wow bang"


@pytest.mark.parametrize("text, tokens", [("nice film", ["nice", "film"]), ("", []),
                                          ("আমি ভাত", ["আমি", "ভাত"])])
def test_tokenize(text, tokens):
    assert textprep.tokenize(text) == tokens


def test_bengali_codepoints_preserved():
    line = "বাংলা ভাষা"
    assert "".join(textprep.tokenize(line)) == line.replace(" ", "")


def test_remove_stopwords():
    assert textprep.remove_stopwords(["the", "film", "is", "good"], frozenset({"the", "is"})) == ["film", "good"]
    assert textprep.remove_stopwords([], frozenset({"a"})) == []
    assert textprep.remove_stopwords(["x", "y"], frozenset({"z"})) == ["x", "y"]


def test_remove_stopwords_case_rules():
    stops = frozenset({"the", "এবং"})
    assert textprep.remove_stopwords(["The", "THE", "film"], stops) == ["film"]
    assert textprep.remove_stopwords(["এবং", "ভালো"], stops) == ["ভালো"]


def test_load_stopwords(tmp_path):
    p = tmp_path / "stops.txt"
    p.write_text("# comment\nThe\n\n  and \nএবং\n", encoding="utf-8")
    assert textprep.load_stopwords(p) == frozenset({"the", "and", "এবং"})
    with pytest.raises(ConfigError):
        textprep.load_stopwords(tmp_path / "missing.txt")


def test_builtin_stopwords():
    assert "the" in textprep.builtin_stopwords("english")
    assert len(textprep.builtin_stopwords("bengali")) > 100
    with pytest.raises(ConfigError):
        textprep.builtin_stopwords("klingon")


def test_encode_labels():
    y, mapping = textprep.encode_labels(["positive", "negative", "positive"])
    assert y.tolist() == [1, 0, 1] and mapping == {"negative": 0, "positive": 1}
    assert textprep.encode_labels(["a", "b"])[0].tolist() == [0, 1]
    with pytest.raises(DatasetError, match="'x'"):
        textprep.encode_labels(["x", "x"])
    with pytest.raises(DatasetError):
        textprep.encode_labels(["a", "b", "c"])


def test_vocabulary_examples():
    v = textprep.build_vocabulary([["good", "good", "film"], ["bad", "film"]])
    assert v.index == {"bad": 0, "film": 1, "good": 2}
    assert textprep.build_vocabulary([["a"]]).index == {"a": 0}
    with pytest.raises(DatasetError):
        textprep.build_vocabulary([])
    with pytest.raises(DatasetError):
        textprep.build_vocabulary([[], []])


def test_vectorize_examples():
    v = textprep.Vocabulary(["bad", "film", "good"])
    assert textprep.vectorize(["good", "good", "film"], v).tolist() == [0, 1, 2]
    assert textprep.vectorize([], v).tolist() == [0, 0, 0]
    assert textprep.vectorize(["unseen"], v).tolist() == [0, 0, 0]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(["a", "b", "c", "oov1", "oov2"]), max_size=30))
def test_count_conservation(tokens):
    v = textprep.Vocabulary(["a", "b", "c"])
    assert textprep.vectorize(tokens, v).sum() == sum(t in v for t in tokens)


def test_vocabulary_is_deterministic_and_round_trips(tmp_path):
    corpus = [["zeta", "alpha"], ["ভালো", "beta", "alpha"], ["with,comma"]]
    a = textprep.build_vocabulary(corpus)
    b = textprep.build_vocabulary(list(reversed(corpus)))
    assert a.to_csv() == b.to_csv()
    a.save(tmp_path / "v.csv")
    assert textprep.Vocabulary.load(tmp_path / "v.csv") == a
    assert textprep.Vocabulary.load(tmp_path / "v.csv").to_csv() == a.to_csv()


def test_vocabulary_csv_validation():
    with pytest.raises(DatasetError):
        textprep.Vocabulary.from_csv("word,id\na,0\n")
    with pytest.raises(DatasetError):
        textprep.Vocabulary.from_csv("term,index\nb,0\na,1\n")


def test_vectorize_corpus_shape():
    v = textprep.Vocabulary(["a", "b"])
    m = textprep.vectorize_corpus([["a"], ["b", "b"], []], v)
    assert m.dtype == np.int64
    assert m.tolist() == [[1, 0], [0, 2], [0, 0]]


def test_language_profile_english_lowercases():
    profile = textprep.language_profile("english")
    assert profile.process("The FILM was Great!!") == ["film", "great"]


def test_language_profile_custom(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("ভালো\n", encoding="utf-8")
    profile = textprep.language_profile("bengali", stopwords_path=p, rules=[("ws", r"\s+")])
    assert profile.process("খুব ভালো!") == ["খুব", "ভালো!"]  # punctuation rule not active
    assert profile.process("খুব ভালো") == ["খুব"]
