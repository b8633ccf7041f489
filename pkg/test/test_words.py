import pytest

from word_map_lab.errors import WordError, WordSyntaxError
from word_map_lab.words import (
    MAX_NESTING_DEPTH,
    Word,
    build_named_word,
    concat_words,
    disjoint_blocks,
    free_reduce,
    invert_word,
    parse_named_word,
    parse_word,
    render_word,
    shift_word,
)

# --- Parsing ---

def test_parse_commutator_expands_to_letters():
    """[u,v] is u^-1 v^-1 u v."""
    w = parse_word("[x1,x2]")
    assert w.arity == 2
    assert w.letters == ((1, -1), (2, -1), (1, 1), (2, 1))

def test_parse_identity_forms():
    assert parse_word("").is_identity
    assert parse_word("1").is_identity
    assert parse_word("x1 x1^-1").is_identity

def test_cancelled_letters_still_count_for_arity():
    w = parse_word("x1 x3 x3^-1 x1^-1")
    assert w.is_identity
    assert w.arity == 3

def test_arity_hint_pads_and_is_checked():
    assert parse_word("x1^2", arity_hint=3).arity == 3
    with pytest.raises(WordError):
        parse_word("x1 x4", arity_hint=2)

def test_power_of_parenthesized_word():
    assert parse_word("(x1 x2)^2").letters == ((1, 1), (2, 1), (1, 1), (2, 1))
    assert parse_word("(x1 x2)^-1").letters == ((2, -1), (1, -1))

def test_nested_commutator():
    w = parse_word("[[x1,x2],x3]")
    assert w.arity == 3
    assert w.exponent_sums() == [0, 0, 0]

@pytest.mark.parametrize("text, position", [
    ("x1 ^", 3),
    ("x0", 0),
    ("[x1 x2]", 6),
    ("x1 ?", 3),
    ("x1^0", 2),
])
def test_syntax_errors_carry_position(text, position):
    with pytest.raises(WordSyntaxError) as info:
        parse_word(text)
    assert info.value.position == position

def test_unclosed_bracket_reports_end_of_input():
    with pytest.raises(WordSyntaxError) as info:
        parse_word("[x1,x2")
    assert info.value.position == len("[x1,x2")

def test_nesting_depth_is_limited():
    assert parse_word("(" * 50 + "[x1,x2]" + ")" * 50) == parse_word("[x1,x2]")
    with pytest.raises(WordSyntaxError) as info:
        parse_word("(" * 3000 + "x1" + ")" * 3000)
    assert info.value.position == MAX_NESTING_DEPTH
    with pytest.raises(WordSyntaxError):
        parse_word("[" * 3000 + "x1,x2" + "]" * 3000)

@pytest.mark.parametrize("text, position", [
    ("x\u0661", 0),
    ("x1^\u0662", 2),
    ("x\uff11", 0),
])
def test_only_ascii_digits_are_read(text, position):
    with pytest.raises(WordSyntaxError) as info:
        parse_word(text)
    assert info.value.position == position

# --- Rendering and letter algebra ---

def test_render_round_trip_on_corpus(word_corpus):
    for text in word_corpus:
        w = parse_word(text)
        again = parse_word(render_word(w), arity_hint=w.arity)
        assert again == w, text

def test_render_uses_signed_exponents():
    assert render_word(parse_word("[x1,x2]")) == "x1^-1 x2^-1 x1 x2"
    assert render_word(Word.identity(2)) == "1"

def test_free_reduce_merges_and_cancels():
    assert free_reduce([(1, 2), (1, -2), (2, 1), (2, 2), (3, 0)]) == [(2, 3)]

def test_word_rejects_unreduced_letters():
    with pytest.raises(WordError):
        Word(2, ((1, 1), (1, 1)))
    with pytest.raises(WordError):
        Word(1, ((2, 1),))

def test_invert_and_concat_cancel():
    w = parse_word("x1^2 [x1,x2] x2")
    assert concat_words(w, invert_word(w)).is_identity

def test_shift_word_renames_variables():
    shifted = shift_word(parse_word("[x1,x2]"), 2)
    assert shifted.arity == 4
    assert render_word(shifted) == "x3^-1 x4^-1 x3 x4"

# --- Named words ---

def test_named_wk():
    assert render_word(build_named_word("wk", 2)) == render_word(parse_word("[x1,x2][x3,x4]"))
    assert parse_named_word("wk:1").arity == 2

def test_named_left_normed_and_vn():
    assert build_named_word("left_normed", 3) == parse_word("[[x1,x2],x3]")
    assert build_named_word("vn", 2) == parse_word("x1 x2 x1^-1 x2^-1")

def test_named_word_domain():
    with pytest.raises(WordError):
        build_named_word("wk", 0)
    with pytest.raises(WordError):
        build_named_word("power", 2)
    with pytest.raises(WordError):
        parse_named_word("wk")

# --- Disjoint blocks ---

def test_disjoint_blocks_split_w2():
    blocks, unused = disjoint_blocks(build_named_word("wk", 2))
    assert unused == 0
    assert [used for _, used in blocks] == [[1, 2], [3, 4]]
    assert all(block == parse_word("[x1,x2]") for block, _ in blocks)

def test_disjoint_blocks_keep_interleaved_words_whole():
    blocks, unused = disjoint_blocks(parse_word("x1 x2 x1^-1 x3", arity_hint=4))
    assert [used for _, used in blocks] == [[1, 2], [3]]
    assert unused == 1
