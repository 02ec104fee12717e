"""Acceptance criteria at their pinned tolerances, one PASS/FAIL line each."""
import json

import pytest

from qorth import acceptance

from conftest import ACCEPTANCE_LINES

SEED = 0


def record(result):
    line = result.line()
    shown = {k: v for k, v in result.details.items() if k != "directions"}
    ACCEPTANCE_LINES.append(f"{line} {json.dumps(shown, default=str)}")
    print(line)
    return result


@pytest.fixture(scope="module")
def search_6b():
    r = acceptance.criterion_6b(SEED)
    k4 = r.details.pop("_k4_result")
    return r, k4


def test_criterion_1_useful_iff_complementary():
    assert record(acceptance.criterion_1(SEED)).passed


def test_criterion_2_kak_roundtrip():
    assert record(acceptance.criterion_2(SEED)).passed


def test_criterion_3_useful_iff_class_N():
    assert record(acceptance.criterion_3(SEED)).passed


def test_criterion_4_overlap_at_least_one():
    assert record(acceptance.criterion_4(SEED)).passed


def test_criterion_5_conditional_expectations():
    r = record(acceptance.criterion_5())
    assert r.passed
    dirs = r.details["directions"]
    assert dirs[3]["resolved"] == "ZI"


def test_criterion_6a_discrete_family():
    assert record(acceptance.criterion_6a()).passed


def test_criterion_6b_continuous_search(search_6b):
    r, _ = search_6b
    assert record(r).passed


def test_criterion_7_budget(search_6b):
    _, k4 = search_6b
    assert record(acceptance.criterion_7(k4, SEED)).passed


def test_criterion_8_minimal_projections():
    assert record(acceptance.criterion_8(SEED)).passed
