import pytest
from hypothesis import given, strategies as st

from legal_deid.segtok import AbbreviationLexicon, analyze, segment, tokenize
from legal_deid.text_model import Document, Span, Token

HARD_FRAGMENTS = [
    "En el mismo sentido se pronunció el Tribunal en lo Civil de 7o. Turno, cuando en Sentencia No. 134/98 sostuvo que...",
    "Como lo plantea el Sr. Fiscal de Corte a fs. 183 v., si bien ateniéndonos...",
    "(Nicolás Coviello, Doctrina General del Derecho Civil, pág. 78, Cf. Eduardo García Maynez, "
    "Introducción al estudio del derecho, pág. 329)",
]


def surfaces(text, lex):
    return [t.surface for t in tokenize(Document("d", text), lex)]


def test_sentence_number(lex):
    assert surfaces("Sentencia No. 134/98", lex) == ["Sentencia", "No.", "134/98"]


def test_folio_reference(lex):
    assert surfaces("a fs. 183 v.,", lex) == ["a", "fs.", "183", "v.", ","]


def test_empty_text(lex):
    assert surfaces("", lex) == []


def test_slashed_page_range_and_ordinal(lex):
    assert surfaces("a fs. 36/37 del 7o. Turno", lex) == ["a", "fs.", "36/37", "del", "7o.", "Turno"]


def test_caption_separator_is_one_token(lex):
    assert "c/" in surfaces("Martínez c/ Pérez", lex)


def test_initial(lex):
    assert surfaces("el Dr. J. Pérez", lex) == ["el", "Dr.", "J.", "Pérez"]


@pytest.mark.parametrize("text", HARD_FRAGMENTS)
def test_table_fragments_are_one_sentence(lex, text):
    assert len(analyze(Document("d", text), lex).sentences) == 1


def test_plain_periods_split(lex):
    seg = analyze(Document("d", "Se resolvió. Notifíquese. Archívese!"), lex)
    assert len(seg.sentences) == 3


def test_period_before_digit_or_lowercase_does_not_split(lex):
    assert len(analyze(Document("d", "Ver el expediente. 12 fojas. y más"), lex).sentences) == 1


def test_closing_bracket_stays_with_sentence(lex):
    doc = Document("d", "Se dijo (algo.) Luego otra cosa.")
    seg = analyze(doc, lex)
    assert len(seg.sentences) == 2
    first = seg.sentence_spans()[0]
    assert doc.text[first.start:first.end] == "Se dijo (algo.)"


def test_abbreviation_split_by_foreign_tokenizer(lex):
    # "fs" and "." as separate tokens, as another tokenizer might produce
    tokens = [Token(Span(0, 1), "a"), Token(Span(2, 4), "fs"), Token(Span(4, 5), "."), Token(Span(6, 9), "Vta")]
    assert len(segment(tokens)) == 2
    assert len(segment(tokens, Document("d", "a fs. Vta"), lex)) == 1


def test_new_abbreviation_without_code_change(lex, tmp_path):
    text = "Lo dijo el Pbro. Martínez en la audiencia."
    assert len(analyze(Document("d", text), lex).sentences) == 2
    path = tmp_path / "abbr.txt"
    path.write_text("# custom\nPbro.\n", encoding="utf-8")
    custom = AbbreviationLexicon.load(path)
    assert len(analyze(Document("d", text), custom).sentences) == 1
    assert len(analyze(Document("d", text), lex.with_entries("Pbro.")).sentences) == 1


def test_lexicon_rejects_entries_without_period():
    with pytest.raises(ValueError):
        AbbreviationLexicon(frozenset({"Sr"}))


def test_lexicon_rejects_casefold_duplicates():
    with pytest.raises(ValueError):
        AbbreviationLexicon(frozenset({"Art.", "art."}))


def test_casefold_fallback():
    strict = AbbreviationLexicon(frozenset({"Art."}), initials=False)
    loose = AbbreviationLexicon(frozenset({"Art."}), initials=False, casefold_fallback=True)
    assert not strict.is_abbreviation("ART.")
    assert loose.is_abbreviation("ART.")


def test_ordinals_can_be_disabled():
    lex = AbbreviationLexicon(frozenset(), ordinals=False)
    assert len(analyze(Document("d", "El 7o. Turno falló."), lex).sentences) == 2


def test_sentence_of(lex):
    seg = analyze(Document("d", "Uno. Dos."), lex)
    assert seg.sentence_of(0) == 0
    assert seg.sentence_of(len(seg.tokens) - 1) == 1
    with pytest.raises(IndexError):
        seg.sentence_of(99)


text_alphabet = st.sampled_from(list("abcSrfs. ,;7o/()Á\n!?") + [" Sr. ", " fs. ", " 36/37 ", "..."])
texts = st.lists(text_alphabet, max_size=40).map("".join)


@given(texts)
def test_tokens_cover_all_non_whitespace(text):
    lex = AbbreviationLexicon.default()
    tokens = tokenize(Document("d", text), lex)
    covered = set()
    for t in tokens:
        assert text[t.start:t.end] == t.surface
        covered.update(range(t.start, t.end))
    assert covered == {i for i, c in enumerate(text) if not c.isspace()}
    for a, b in zip(tokens, tokens[1:]):
        assert a.end <= b.start


@given(texts)
def test_sentences_partition_tokens(text):
    lex = AbbreviationLexicon.default()
    seg = analyze(Document("d", text), lex)
    flat = [i for s in seg.sentences for i in s.token_range]
    assert flat == list(range(len(seg.tokens)))
