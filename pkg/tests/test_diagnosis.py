import pytest

from txdiag import (
    ActivationMatrix,
    Candidate,
    LengthMismatch,
    FormatError,
    ResponseMismatch,
    RowKey,
    SearchBudgetExceeded,
    VerdictKind,
    diagnose,
    diagnose_multiple,
    diagnose_single,
    match_responses,
    parse_response_text,
    render_response_text,
    simulate,
    xor_distance,
)

# Response with failures on T1, T2 and T6 only: no single column matches and
# no pair of block classes ORs to it (B3, B4 and B8 together would).
NO_PAIR_COVER = (1, 1, 0, 0, 0, 1)


def test_xor_distance_counts_mismatches():
    assert xor_distance((1, 0, 1), (1, 1, 0)) == 2
    assert xor_distance((), ()) == 0


def test_single_fault_is_ranked_first(sink_matrix):
    r = simulate(sink_matrix, ["B4"])
    assert r == (0, 1, 0, 0, 0, 0)
    ranked = diagnose_single(sink_matrix, r)
    assert ranked[0] == Candidate(("B4",), 0)
    assert [c.distance for c in ranked] == sorted(c.distance for c in ranked)


def test_equivalent_blocks_share_one_candidate(sink_matrix):
    r = simulate(sink_matrix, ["B3"])
    ranked = diagnose_single(sink_matrix, r)
    assert ranked[0] == Candidate(("B3", "B9"), 0)


def test_distances_match_brute_force(sink_matrix):
    r = NO_PAIR_COVER
    by_class = {c.blocks: c.distance for c in diagnose_single(sink_matrix, r)}
    for blocks, d in by_class.items():
        col = sink_matrix.column(blocks[0])
        assert d == sum(a ^ b for a, b in zip(col, r))


def test_single_rejects_wrong_length(sink_matrix):
    with pytest.raises(LengthMismatch):
        diagnose_single(sink_matrix, (0, 1))
    with pytest.raises(ValueError):
        diagnose_single(sink_matrix, (0, 1, 2, 0, 0, 0))


def test_multiple_finds_minimal_covers(sink_matrix):
    r = simulate(sink_matrix, ["B3", "B13"])
    covers = diagnose_multiple(sink_matrix, r, k_max=2)
    assert set(covers) == {("B13",), ("B11", "B3")}
    for cover in covers:
        acc = [0] * len(sink_matrix.rows)
        for b in cover:
            acc = [x | y for x, y in zip(acc, sink_matrix.column(b))]
        assert tuple(acc) == r


def test_multiple_covers_are_inclusion_minimal(sink_matrix):
    r = simulate(sink_matrix, ["B4", "B7"])
    covers = diagnose_multiple(sink_matrix, r, k_max=3)
    sets = [frozenset(c) for c in covers]
    for a in sets:
        for b in sets:
            assert a == b or not a < b


def test_multiple_respects_budget(sink_matrix):
    with pytest.raises(SearchBudgetExceeded):
        diagnose_multiple(sink_matrix, (1, 1, 1, 1, 1, 1), k_max=3, budget=10)


def test_diagnose_fault_free(sink_matrix):
    v = diagnose(sink_matrix, (0,) * 6)
    assert v.kind is VerdictKind.FAULT_FREE
    assert v.candidates == () and v.covers == ()


def test_diagnose_reports_exact_candidates(sink_matrix):
    v = diagnose(sink_matrix, simulate(sink_matrix, ["B4"]))
    assert v.kind is VerdictKind.CANDIDATES
    assert v.candidates[0] == Candidate(("B4",), 0)
    assert "B4" in v.note


def test_diagnose_falls_back_to_covers(sink_matrix):
    r = simulate(sink_matrix, ["B4", "B7"])
    v = diagnose(sink_matrix, r)
    assert v.kind is VerdictKind.CANDIDATES
    assert v.candidates[0].distance > 0
    assert ("B4", "B7") in v.covers


def test_diagnose_test_deficient(sink_matrix):
    v = diagnose(sink_matrix, NO_PAIR_COVER, k_max=2)
    assert v.kind is VerdictKind.TEST_DEFICIENT
    assert v.covers == ()
    assert v.candidates  # ranked suspects still reported
    # with a deeper search the same response is explained by three classes
    v3 = diagnose(sink_matrix, NO_PAIR_COVER, k_max=3)
    assert v3.kind is VerdictKind.CANDIDATES
    assert ("B3", "B4", "B8") in v3.covers


def test_response_text_round_trip(sink_matrix):
    r = simulate(sink_matrix, ["B1"])
    text = render_response_text(sink_matrix, r)
    parsed = parse_response_text(text)
    assert match_responses(sink_matrix, parsed) == r


def test_response_text_is_order_insensitive(sink_matrix):
    r = simulate(sink_matrix, ["B1"])
    lines = render_response_text(sink_matrix, r).splitlines()
    shuffled = "\n".join(reversed(lines)) + "\n"
    assert match_responses(sink_matrix, parse_response_text(shuffled)) == r


def test_response_text_ignores_blanks_and_comments(sink_matrix):
    text = "# header\n\nT1,S9,1\nT2,S9,0\nT3,S9,0\nT4,S9,0\nT5,S9,0\nT6,S9,0\n"
    r = match_responses(sink_matrix, parse_response_text(text))
    assert r == (1, 0, 0, 0, 0, 0)


def test_response_text_errors(sink_matrix):
    with pytest.raises(FormatError):
        parse_response_text("T1,S9\n")
    with pytest.raises(FormatError):
        parse_response_text("T1,S9,yes\n")
    with pytest.raises(ResponseMismatch):
        parse_response_text("T1,S9,1\nT1,S9,0\n")
    with pytest.raises(ResponseMismatch):
        match_responses(sink_matrix, parse_response_text("T1,S9,1\n"))
    extra = render_response_text(sink_matrix, (0,) * 6) + "T9,S9,1\n"
    with pytest.raises(ResponseMismatch):
        match_responses(sink_matrix, parse_response_text(extra))


def test_every_single_fault_identifies_its_class(refined_matrix):
    for b in refined_matrix.cols:
        ranked = diagnose_single(refined_matrix, simulate(refined_matrix, [b]))
        assert ranked[0] == Candidate((b,), 0)


def test_zero_column_matrix_keeps_class_on_top():
    m = ActivationMatrix(
        (RowKey("T1", "M"),), ("B1", "B2"), ((0, 1),)
    )
    ranked = diagnose_single(m, (0,))
    assert ranked[0] == Candidate(("B1",), 0)
