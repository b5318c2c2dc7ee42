import pytest
from hypothesis import assume, given, strategies as st

from conftest import capitals, make_corpus, make_doc
from contextner.errors import DataFormatError, InputError
from contextner.extract import ContextKey, tokenize
from contextner.seeds import LearningExample
from contextner.recognize import (
    UNKNOWN,
    RecognitionModel,
    VoteState,
    classify,
    detect_candidates,
    load_annotations,
    load_model,
    recognize_document,
    save_model,
    update_model,
    vote,
    write_annotations,
)
from contextner.weighting import build_weight_table


def left(*words):
    return ContextKey(tuple(words), "left")


def right(*words):
    return ContextKey(tuple(words), "right")


def model_from(tables, **kwargs):
    return RecognitionModel(tables=tables, **kwargs)


# -- voting and the decision rule -------------------------------------------

def test_vote_accumulates():
    state = VoteState()
    vote(state, "capital", 0.5)
    vote(state, "capital", 0.25)
    assert state.votes == {"capital": 0.75}


def test_single_vote_keeps_exact_weight():
    state = vote(VoteState(), "capital", 0.008110106)
    assert state.votes["capital"] == 0.008110106


def test_votes_per_class_are_independent():
    state = VoteState()
    vote(state, "capital", 0.3)
    vote(state, "president", 0.2)
    assert state.votes == {"capital": 0.3, "president": 0.2}


def test_vote_rejects_non_positive_weight():
    with pytest.raises(ValueError):
        vote(VoteState(), "capital", 0.0)
    with pytest.raises(ValueError):
        vote(VoteState(), "capital", -1.0)


def test_vote_totals_match_contributions():
    state = VoteState()
    for w in (0.1, 0.2, 0.40625):
        vote(state, "capital", w, left("Map", "of"))
    assert state.votes["capital"] == sum(w for _, w in state.contributions["capital"])


def test_classify_threshold_and_margin():
    state = VoteState(votes={"capital": 0.9, "president": 0.1})
    assert classify(state, threshold=0.5, margin=0.2) == "capital"
    assert classify(VoteState(votes={"capital": 0.4}), threshold=0.5) == UNKNOWN
    assert classify(VoteState(votes={"a": 0.6, "b": 0.6}), threshold=0.5) == UNKNOWN
    assert classify(VoteState()) == UNKNOWN


def test_classify_margin_blocks_close_calls():
    state = VoteState(votes={"a": 0.5, "b": 0.45})
    assert classify(state, margin=0.1) == UNKNOWN
    assert classify(state, margin=0.01) == "a"


@given(
    votes=st.dictionaries(
        st.sampled_from(["a", "b", "c", "d"]),
        st.floats(0.001, 1.0),
        min_size=1,
        max_size=4,
    ),
    threshold=st.floats(0.0, 1.5),
    margin=st.floats(0.0, 1.0),
    scale=st.floats(0.01, 100.0),
)
def test_classify_scale_invariance(votes, threshold, margin, scale):
    """Scaling votes, threshold, and margin together never changes the
    answer — away from exact decision boundaries, where one float
    rounding can legitimately flip a comparison."""
    ranked = sorted(votes.values(), reverse=True)
    best = ranked[0]
    second = ranked[1] if len(ranked) > 1 else 0.0
    assume(abs(best - threshold) > 1e-6 * (1 + best + threshold))
    assume(abs((best - second) - margin) > 1e-6 * (1 + best + margin))
    plain = classify(VoteState(votes=dict(votes)), threshold, margin)
    scaled = classify(
        VoteState(votes={k: v * scale for k, v in votes.items()}),
        threshold * scale,
        margin * scale,
    )
    assert plain == scaled


# -- candidate detection -----------------------------------------------------

def test_detect_after_left_context():
    tok = tokenize("Hotels in Paris are nice")
    model = model_from({"capital": {left("Hotels", "in"): 1.0}})
    assert detect_candidates(tok, model) == [(2, 2)]


def test_detect_multiword_until_lowercase():
    tok = tokenize("president Nicolas Sarkozy with him")
    model = model_from({"president": {left("president"): 1.0}})
    assert detect_candidates(tok, model) == [(1, 2)]


def test_detect_nothing_without_context():
    tok = tokenize("Just some words here")
    model = model_from({"capital": {left("Hotels", "in"): 1.0}})
    assert detect_candidates(tok, model) == []


def test_detect_stops_at_sentence_break():
    tok = tokenize("Hotels in Paris. Prices are high")
    model = model_from({"capital": {left("Hotels", "in"): 1.0}})
    assert detect_candidates(tok, model) == [(2, 2)]


def test_detect_caps_span_length():
    tok = tokenize("Hotels in Rio De La Plata Grande Norte")
    model = model_from({"capital": {left("Hotels", "in"): 1.0}}, max_entity_tokens=4)
    assert detect_candidates(tok, model) == [(2, 5)]


def test_detect_right_side_extends_backwards():
    tok = tokenize("old George W. Bush arrived in town")
    model = model_from({"president": {right("arrived", "in"): 1.0}})
    assert detect_candidates(tok, model) == [(1, 3)]


def test_detect_deduplicates_spans():
    tok = tokenize("Map of Paris and Map of Paris")
    model = model_from(
        {"capital": {left("Map", "of"): 1.0}, "other": {left("of"): 0.5}}
    )
    spans = detect_candidates(tok, model)
    assert spans == sorted(set(spans))
    assert (2, 2) in spans and (6, 6) in spans


def test_model_validation():
    with pytest.raises(ValueError):
        model_from({UNKNOWN: {left("x"): 1.0}})
    with pytest.raises(ValueError):
        model_from({"capital": {left("x"): 0.0}})
    with pytest.raises(ValueError):
        model_from({"capital": {left("x"): 1.0}}, threshold=-0.1)
    with pytest.raises(ValueError):
        model_from({"capital": {left("x"): 1.0}}, max_entity_tokens=0)


# -- document recognition ----------------------------------------------------

def test_recognize_simple_document():
    doc = make_doc("t1", "Hotels in Paris")
    model = model_from(
        {"capital": {left("Hotels", "in"): 0.008110106}}, threshold=0.001
    )
    annotations = recognize_document(doc, model)
    assert len(annotations) == 1
    a = annotations[0]
    assert (a.surface, a.class_label) == ("Paris", "capital")
    assert a.score == 0.008110106
    assert a.runner_up == 0.0


def test_recognize_threshold_flips_to_unknown():
    doc = make_doc("t1", "Hotels in Paris")
    model = model_from(
        {"capital": {left("Hotels", "in"): 0.008110106}}, threshold=0.05
    )
    annotations = recognize_document(doc, model)
    assert [a.class_label for a in annotations] == [UNKNOWN]


def test_recognize_empty_model_yields_nothing():
    assert recognize_document(make_doc("t1", "Hotels in Paris"), model_from({})) == []


def test_shared_context_votes_in_both_classes():
    """A context present in two tables pulls both classes, each with its
    own weight; the margin decides. ("Mr" is a two-letter token, so its
    period reads as a sentence end — detection must still fire.)"""
    doc = make_doc("t1", "Mr. Zidane plays")
    tables = {
        "athlete": {left("Mr"): 0.6},
        "president": {left("Mr"): 0.2},
    }
    decided = recognize_document(doc, model_from(tables, margin=0.3))[0]
    assert (decided.surface, decided.class_label) == ("Zidane", "athlete")
    assert decided.score == 0.6
    assert decided.runner_up == 0.2
    undecided = recognize_document(doc, model_from(tables, margin=0.5))[0]
    assert undecided.class_label == UNKNOWN


def test_non_unknown_annotations_respect_decision_rule():
    text = "Map of Paris. Map of Berlin and Hotels in Rome. Visit to Lima."
    model = model_from(
        {
            "capital": {left("Map", "of"): 0.4, left("Hotels", "in"): 0.2},
            "place": {left("Map", "of"): 0.3, left("Visit", "to"): 0.1},
        },
        threshold=0.15,
        margin=0.05,
    )
    for a in recognize_document(make_doc("d", text), model):
        if a.class_label != UNKNOWN:
            assert a.score >= model.threshold
            assert a.score - a.runner_up >= model.margin


def test_annotations_sorted_by_span():
    text = "Map of Paris and Map of Berlin and Map of Tunis"
    model = model_from({"capital": {left("Map", "of"): 1.0}})
    starts = [a.first for a in recognize_document(make_doc("d", text), model)]
    assert starts == sorted(starts)


# -- model persistence -------------------------------------------------------

@pytest.fixture
def trained_table():
    corpus = make_corpus("Hotels in Paris. Map of Berlin and Map of pages.")
    return build_weight_table(corpus, capitals("Paris", "Berlin"))


def test_save_load_round_trip(tmp_path, trained_table):
    save_model(tmp_path, {"capital": trained_table}, threshold=0.2, margin=0.1)
    model = load_model(tmp_path)
    assert model.threshold == 0.2
    assert model.margin == 0.1
    assert model.tables["capital"] == pytest.approx(trained_table.as_mapping())


def test_load_model_flag_overrides(tmp_path, trained_table):
    save_model(tmp_path, {"capital": trained_table}, threshold=0.2, margin=0.1)
    model = load_model(tmp_path, threshold=0.7)
    assert (model.threshold, model.margin) == (0.7, 0.1)


def test_load_model_missing_dir(tmp_path):
    with pytest.raises(InputError, match="model.tsv"):
        load_model(tmp_path / "none")


def test_load_model_reports_bad_line(tmp_path, trained_table):
    save_model(tmp_path, {"capital": trained_table})
    index = tmp_path / "model.tsv"
    body = index.read_text(encoding="utf-8").replace("\t0\t0", "\tzero\t0")
    index.write_text(body, encoding="utf-8")
    with pytest.raises(DataFormatError, match=r"model\.tsv:2"):
        load_model(tmp_path)


def test_load_model_rejects_missing_table_file(tmp_path, trained_table):
    save_model(tmp_path, {"capital": trained_table})
    (tmp_path / "table_capital.tsv").unlink()
    with pytest.raises(DataFormatError, match="table_capital.tsv"):
        load_model(tmp_path)


def test_update_model_merges_classes(tmp_path, trained_table):
    update_model(tmp_path, "capital", trained_table)
    other = build_weight_table(
        make_corpus("elected president Chirac. Meet president Bush."),
        [
            LearningExample("Chirac", "president"),
            LearningExample("Bush", "president"),
        ],
    )
    update_model(tmp_path, "president", other, threshold=0.3)
    model = load_model(tmp_path)
    assert set(model.tables) == {"capital", "president"}
    assert model.threshold == 0.3


def test_annotations_file_round_trip(tmp_path):
    doc = make_doc("t1", "Hotels in Paris and Hotels in Lyon")
    model = model_from({"capital": {left("Hotels", "in"): 0.25}})
    annotations = recognize_document(doc, model)
    path = tmp_path / "ann.tsv"
    write_annotations(annotations, path)
    assert load_annotations(path) == annotations


def test_load_annotations_reports_bad_ints(tmp_path):
    path = tmp_path / "ann.tsv"
    path.write_text(
        "doc\tstart_token\tend_token\tsurface\tclass\tscore\trunner_up\n"
        "d\tx\t1\tParis\tcapital\t0.5\t0\n",
        encoding="utf-8",
    )
    with pytest.raises(DataFormatError, match=r"ann\.tsv:2"):
        load_annotations(path)
