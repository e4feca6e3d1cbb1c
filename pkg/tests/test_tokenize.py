import pytest

from erblock.blocking.tokenize import TokenizerConfig, jaccard, tokenize, trigrams
from erblock.model import Value


def test_token_examples():
    assert tokenize(Value.literal("Eiffel Tower")) == ["eiffel", "tower"]
    assert tokenize(Value.literal("")) == []
    assert tokenize(Value.literal("Statue of Lib.")) == ["statue", "of", "lib"]


def test_resource_values():
    uri = Value.resource("http://dbpedia.org/resource/Eiffel_Tower")
    assert tokenize(uri) == ["dbpedia", "org", "resource", "eiffel", "tower"]
    assert tokenize(uri, TokenizerConfig(tokenize_resource_values=False)) == []


def test_config_knobs():
    cfg = TokenizerConfig(case_fold=False, min_token_length=3)
    assert tokenize("NY is Big", cfg) == ["Big"]
    with pytest.raises(ValueError):
        TokenizerConfig(min_token_length=0)
    assert TokenizerConfig().to_dict() == {"delimiters": r"[\W_]+", "case_fold": True, "min_token_length": 1,
                                           "tokenize_resource_values": True}


def test_trigrams():
    assert trigrams("tower") == {"tow", "owe", "wer"}
    assert trigrams("") == frozenset()
    assert trigrams("ab") == {"ab"}
    assert trigrams("A  b") == {"a b"}


def test_jaccard():
    assert jaccard({"x"}, {"x"}) == 1.0
    assert jaccard({"x"}, {"y"}) == 0.0
    assert jaccard({"tow", "owe", "wer"}, {"owe", "wer", "erx"}) == 0.5
    assert jaccard(set(), set()) == 0.0
