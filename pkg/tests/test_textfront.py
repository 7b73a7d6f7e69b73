import pytest
from hypothesis import given, strategies as st

from prompttts.textfront import (
    BOUNDARY,
    LETTER_FALLBACK,
    Lexicon,
    PHONEMES,
    Vocabulary,
    g2p,
    normalize_words,
    split_prompt,
    tokenize_prompt,
)


class TestSplitPrompt:
    def test_reference_prompt(self):
        style, content = split_prompt(
            "A lady whispers to her friend slowly: Everything will go fine, right?")
        assert style == "A lady whispers to her friend slowly"
        assert content == "Everything will go fine, right?"

    def test_first_colon_rule(self):
        assert split_prompt("a: b: c") == ("a", "b: c")

    def test_missing_colon(self):
        with pytest.raises(ValueError, match="missing colon separator"):
            split_prompt("no separator here")

    def test_empty_sides(self):
        with pytest.raises(ValueError, match="style"):
            split_prompt(" : content")
        with pytest.raises(ValueError, match="content"):
            split_prompt("style:  ")

    @given(st.text(alphabet=st.characters(blacklist_characters=":"), min_size=1),
           st.text(alphabet=st.characters(blacklist_characters=":"), min_size=1))
    def test_join_split_roundtrip(self, style, content):
        style, content = style.strip(), content.strip()
        if not style or not content:
            return
        assert split_prompt(f"{style}: {content}") == (style, content)


class TestTokenize:
    def test_basic(self, vocab):
        tokens = tokenize_prompt("Shout loudly!", vocab)
        assert tokens.ids[0] == vocab.cls_id
        assert list(tokens.ids[1:]) == [vocab.id("shout"), vocab.id("loudly")]

    def test_deterministic(self, vocab):
        a = tokenize_prompt("A lady whispers softly.", vocab)
        assert a == tokenize_prompt("A lady whispers softly.", vocab)

    def test_unknown_maps_to_unk(self, vocab):
        tokens = tokenize_prompt("snorkeling zebra", vocab)
        assert all(t == vocab.unk_id for t in tokens.ids[1:])

    def test_punctuation_only_raises(self, vocab):
        with pytest.raises(ValueError):
            tokenize_prompt("!!! ... ???", vocab)

    def test_vocab_roundtrip_identity(self, vocab):
        for word in ("lady", "whispers", "loudly", "deep"):
            assert vocab.word(vocab.id(word)) == word

    def test_vocab_covers_template_bank(self, vocab):
        from prompttts.templates import TemplateBank
        bank = TemplateBank.load()
        for options in bank.phrases.values():
            for phrase in options:
                for word in normalize_words(phrase):
                    assert vocab.id(word) != vocab.unk_id, f"{word!r} missing from vocab"


class TestG2P:
    def test_lexicon_word_reads_from_file(self, lexicon):
        assert g2p("friend", lexicon).symbols == ("F", "R", "EH", "N", "D")

    def test_word_boundaries(self, lexicon):
        symbols = g2p("go home", lexicon).symbols
        assert BOUNDARY in symbols
        assert symbols == ("G", "OW", BOUNDARY, "HH", "OW", "M")

    def test_empty_raises(self, lexicon):
        with pytest.raises(ValueError):
            g2p("", lexicon)
        with pytest.raises(ValueError):
            g2p("...", lexicon)

    def test_oov_letter_fallback_deterministic(self, lexicon):
        a = g2p("zzqx", lexicon)
        assert a.symbols == ("Z", "Z", "K", "K", "S")
        assert a == g2p("zzqx", lexicon)

    def test_fallback_units_are_in_inventory(self):
        for units in LETTER_FALLBACK.values():
            for u in units:
                assert u in PHONEMES

    def test_lexicon_rejects_unknown_phonemes(self):
        with pytest.raises(ValueError, match="unknown phoneme"):
            Lexicon({"bad": ("QQ",)})

    def test_bundled_lexicon_size(self, lexicon):
        assert len(lexicon) >= 200

    def test_content_pool_is_fully_covered(self, lexicon):
        from prompttts.corpus import load_content_pool
        for sentence in load_content_pool():
            for word in normalize_words(sentence):
                assert word in lexicon, f"{word!r} missing from bundled lexicon"
