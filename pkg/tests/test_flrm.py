import math

import pytest

from hallustat.core import Alphabet, Str, empty_string, shortlex_string
from hallustat.errors import ConfigError, DomainError
from hallustat.flrm import (
    FlrmTrainer,
    MemorizerModel,
    model_from_json,
    model_to_json,
    predict,
    threshold_length,
    train,
)
from hallustat.measures import CdfLowerBound, GeometricTail, ReachesOne
from hallustat.oracle import TrainingSequence

A2 = Alphabet(2)
HALF_BOUND = CdfLowerBound((0.5,), GeometricTail(0.5))


def s(*symbols):
    return Str(A2, symbols)


def test_threshold_reference_values():
    # for this bound the cutoff for level n is 4^(n+1) * (2n+1) * ln 2
    assert threshold_length(10**6, A2, HALF_BOUND) == 7
    assert threshold_length(10, A2, HALF_BOUND) == 0
    assert threshold_length(3, A2, HALF_BOUND) == 0
    assert threshold_length(2, A2, HALF_BOUND) == -1
    assert threshold_length(0, A2, HALF_BOUND) == -1


def test_threshold_exact_cutoffs():
    # crossing each 4^(n+1)*(2n+1)*ln2 boundary bumps the threshold by one
    for n in range(6):
        rhs = 4 ** (n + 1) * (2 * n + 1) * math.log(2)
        below, above = math.floor(rhs), math.floor(rhs) + 1
        if below > rhs:  # float floor landed above the cutoff
            below -= 1
            above -= 1
        assert threshold_length(below, A2, HALF_BOUND) == n - 1
        assert threshold_length(above, A2, HALF_BOUND) == n


def test_threshold_monotone_in_m():
    prev = -1
    for m in range(0, 3000, 7):
        cur = threshold_length(m, A2, HALF_BOUND)
        assert cur >= prev
        prev = cur


def test_threshold_with_saturated_bound_is_minus_one():
    # bound value 1 everywhere -> zero defect -> no level ever qualifies
    saturated = CdfLowerBound((1.0,), ReachesOne())
    assert threshold_length(10**9, A2, saturated) == -1


def test_threshold_negative_m_rejected():
    with pytest.raises(DomainError):
        threshold_length(-1, A2, HALF_BOUND)


def test_train_memorizes_up_to_threshold():
    t = TrainingSequence(tuple((x, x) for x in (s(0), s(1, 1), s(0, 1, 0))))
    model = train(t, A2, HALF_BOUND)
    # |t| = 3 -> threshold 0: nothing of length >= 1 is kept
    assert model.threshold == 0
    assert model.table == {}
    assert model.predict(s(0)) == empty_string(A2)


def test_train_last_write_wins():
    pairs = ((s(0), s(0)), (s(0), s(1, 1)))
    t = TrainingSequence(pairs * 20)  # 40 pairs -> threshold 1
    model = train(t, A2, HALF_BOUND)
    assert model.threshold == 1
    assert model.predict(s(0)) == s(1, 1)


def test_train_length_filter():
    pairs = tuple((s(*([0] * k)), s(1)) for k in range(5))
    t = TrainingSequence(pairs * 10)  # 50 pairs -> threshold 1
    model = train(t, A2, HALF_BOUND)
    assert model.threshold == 1
    assert set(model.table) == {empty_string(A2), s(0)}


def test_unmemorized_prediction_is_empty_string():
    model = train(TrainingSequence(()), A2, HALF_BOUND)
    assert model.threshold == -1
    assert model(s(1, 0, 1)) == empty_string(A2)
    assert predict(model, s(1)) == empty_string(A2)


def test_trainer_object_matches_free_function():
    trainer = FlrmTrainer(A2, HALF_BOUND)
    t = TrainingSequence(tuple((s(i % 2), s(i % 2)) for i in range(20)))
    assert trainer(t).table == train(t, A2, HALF_BOUND).table


def test_model_validation():
    with pytest.raises(DomainError):
        MemorizerModel(A2, {s(0, 1): s(0)}, 0)  # key longer than threshold
    with pytest.raises(DomainError):
        MemorizerModel(A2, {empty_string(A2): s(0)}, -1)


def test_model_table_is_immutable():
    model = MemorizerModel(A2, {s(0): s(1)}, 1)
    with pytest.raises(TypeError):
        model.table[s(1)] = s(0)


def test_json_roundtrip_and_key_order():
    table = {s(1): s(0), empty_string(A2): s(1, 1), s(0, 0): s(0)}
    model = MemorizerModel(A2, table, 2)
    doc = model_to_json(model)
    assert doc["threshold"] == 2
    listed = [tuple(e["s"]) for e in doc["table"]]
    assert listed == [(), (1,), (0, 0)]  # shortlex order
    back = model_from_json(A2, doc)
    assert back.threshold == model.threshold
    assert back.table == model.table


def test_model_from_json_rejects_malformed():
    with pytest.raises(ConfigError):
        model_from_json(A2, {"table": []})  # missing threshold
    with pytest.raises(ConfigError):
        model_from_json(A2, {"threshold": 1, "table": [{"s": [0]}]})


def test_memorized_strings_score_zero_on_echo():
    # soundness: memorizing qualified echo pairs reproduces the input exactly
    pairs = tuple((shortlex_string(A2, r), shortlex_string(A2, r)) for r in range(31))
    t = TrainingSequence(pairs * 41)  # 1271 pairs -> threshold 3
    model = train(t, A2, HALF_BOUND)
    assert model.threshold == 3
    for r in range(15):  # all strings up to length 3
        x = shortlex_string(A2, r)
        assert model(x) == x
