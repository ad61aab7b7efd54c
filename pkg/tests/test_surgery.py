import json
import shutil

import pytest
from hypothesis import given, strategies as st

from distance5.data import data_dir
from distance5.slopes import INFINITY, Slope, distance, normalize
from distance5.surgery import (ExcludedFamily, ExcludedSlope, IdentificationFailure, IllegalMove,
                               InconsistencyError, ParamSlope, SurgeryDescription, TwistScript,
                               final_slopes, framing_constraint, identify, initial_description,
                               load_description, meridian_candidates, meridian_solve,
                               run_twist_script, toroidal_slope_set, twist)

FIG12 = TwistScript.load("twistscript.figure12")


def test_initial_description_reads_back():
    d = initial_description()
    co = dict(d.coefficients)
    assert [str(co[k]) for k in ("K1", "K1'", "K2")] == ["-2", "3", "-2"]
    assert co["K2'"] == ParamSlope(1, 0, 0, 1)
    assert (d.slope_of("alpha"), d.slope_of("beta")) == (Slope(-3, 5), INFINITY)


def test_zero_filling_rejected():
    with pytest.raises(ExcludedSlope):
        initial_description(0, 1)
    with pytest.raises(ExcludedSlope):
        initial_description(0, -4)
    assert initial_description(2, 3).coefficient("K2'") == Slope(2, 3)


def test_linking_matrix_validated():
    doc = json.loads((data_dir() / "figure10.surgery").read_text())
    d = SurgeryDescription.from_json(doc)
    assert SurgeryDescription.from_json(d.to_json()) == d
    L = [list(r) for r in d.linking]
    L[0][1] = 7
    with pytest.raises(ValueError):
        SurgeryDescription(d.components, d.carrier, d.coefficients, tuple(map(tuple, L)),
                           d.tracked, d.unknotted)


def test_three_twists_reach_the_smaller_frame():
    d = run_twist_script(initial_description(), FIG12)
    assert (d.slope_of("alpha"), d.slope_of("beta")) == (Slope(1, 2), Slope(3, 1))
    assert d.coefficient("K1") == INFINITY and d.coefficient("K2") == INFINITY
    assert d.coefficient("K1'") == Slope(4, 1)
    assert d.coefficient("K2'") == ParamSlope.make(1, 1, 0, 1)
    small = d.restrict(d.fillings())
    fig12 = load_description("figure12.surgery")
    assert set(small.components) == set(fig12.components)
    assert all(small.lk(a, b) == fig12.lk(a, b) for a in fig12.components for b in fig12.components)


def test_empty_script_is_identity():
    d = initial_description()
    assert run_twist_script(d, TwistScript(())) == d


def test_inverse_script_restores():
    d = initial_description()
    assert run_twist_script(run_twist_script(d, FIG12), FIG12.inverse()) == d


def test_knotted_component_cannot_be_twisted():
    d = initial_description()
    d = SurgeryDescription(d.components, d.carrier, d.coefficients, d.linking, d.tracked,
                           d.unknotted - {"K1"})
    with pytest.raises(IllegalMove):
        twist(d, "K1", 1)


def test_symbolic_turns_must_be_bound():
    s = TwistScript.load("twistscript.final.B")
    with pytest.raises(TypeError):
        run_twist_script(initial_description(), s)
    assert s.bind(3).steps[-1] == ("K2'", 2)


def test_meridians():
    assert meridian_solve("1/2", 3, "A") == INFINITY
    assert meridian_solve("1/2", 3, "B") == Slope(1, 1)
    with pytest.raises(InconsistencyError):
        meridian_solve("1/2", "1/2", "A")


def test_meridian_brute_force_small_box():
    # independent oracle: scan all integer vectors, identify m/n with -m/-n
    found = {"A": set(), "B": set()}
    for m in range(-10, 11):
        for n in range(-10, 11):
            if (m, n) == (0, 0):
                continue
            s = normalize(m, n)
            if (s.p, s.q) != (m, n) and (s.p, s.q) != (-m, -n):
                continue
            da, db = abs(m * 2 - n * 1), abs(m * 1 - n * 3)
            if (da, db) == (2, 1):
                found["A"].add(s)
            if (da, db) == (1, 2):
                found["B"].add(s)
    assert found == {"A": {INFINITY}, "B": {Slope(1, 1)}}
    assert meridian_candidates(Slope(1, 2), Slope(3, 1), 2, 1, 10) == [INFINITY]


def test_framing_constraint_examples():
    assert framing_constraint("A", 1, -1) == (True, 1)
    assert framing_constraint("A", 2, -3) == (True, 0)
    assert framing_constraint("B", 1, 1) == (True, 1)
    assert framing_constraint("B", 5, 4) == (True, 2)
    assert framing_constraint("A", 1, 1)[0] is False


def test_final_slopes():
    assert final_slopes(0, "A") == (Slope(-37, 2), Slope(-16, 1))
    assert final_slopes(2, "B") == (Slope(34, 1), Slope(63, 2))
    with pytest.raises(ExcludedFamily):
        final_slopes(1, "A")


def test_toroidal_slope_set():
    pts, dist = toroidal_slope_set(0)
    assert pts == (Slope(-20, 1), Slope(-37, 2), Slope(-16, 1))
    assert sorted(dist.values()) == [3, 4, 5]
    assert dist[(Slope(-20, 1), Slope(-37, 2))] == 3
    assert dist[(Slope(-20, 1), Slope(-16, 1))] == 4
    assert dist[(Slope(-37, 2), Slope(-16, 1))] == 5


@given(st.integers(-500, 500).filter(lambda n: n != 1), st.sampled_from("AB"))
def test_final_distance_is_five(n, case):
    assert distance(*final_slopes(n, case)) == 5


@pytest.mark.parametrize("case,alpha,beta", [("A", "25n-37/2", "25n-16"), ("B", "25n-16", "25n-37/2")])
def test_identify_cases(case, alpha, beta):
    from distance5.figures import load_figure8_pair
    rep = identify(load_figure8_pair(), case)
    assert all(c.ok for c in rep.checkpoints)
    assert (str(rep.final_alpha), str(rep.final_beta)) == (alpha, beta)
    assert rep.family == "k(2,-1,n,0)"
    assert rep.exclusions[0]["n"] == 1 and rep.exclusions[0]["count"] >= 1
    # p/q = 0/1 never solves the framing equation, so only hyperbolicity excludes n = 1
    assert rep.exclusions[1]["count"] == 0


def test_identify_rejects_other_pairs():
    from distance5.graphs import WeightVector, assemble_pairs
    other = next(assemble_pairs(WeightVector(2, (2, 2, 2, 2, 0)), WeightVector(2, (3, 1, 1, 1, 1))))
    with pytest.raises(IdentificationFailure) as e:
        identify(other, "A")
    assert e.value.checkpoint == "survivor is the transcribed pair"


def test_identify_detects_bad_transcription(tmp_path, monkeypatch):
    for f in data_dir().iterdir():
        if f.is_file() and not f.name.endswith(".py"):
            shutil.copy(f, tmp_path / f.name)
    doc = json.loads((tmp_path / "figure10.surgery").read_text())
    doc["linking"] = [[a, b, (2 if (a, b) == ("K0", "K2") else v)] for a, b, v in doc["linking"]]
    (tmp_path / "figure10.surgery").write_text(json.dumps(doc))
    monkeypatch.setenv("TW_DATA_DIR", str(tmp_path))
    with pytest.raises(IdentificationFailure) as e:
        identify(case="A")
    assert e.value.checkpoint == "three twists remove K1 and K2"
