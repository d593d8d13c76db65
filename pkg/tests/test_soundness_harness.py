from dataclasses import replace

from toto.dynamics import step
from toto.generator import TestCase, gen_typed_term
from toto.soundness_harness import (
    case_seeds, check_preservation, check_progress, extend_sigma, negative_controls,
    run_selftest, run_trace, storecontext_check, subcontext,
)
from toto.tag_store import EMPTY, Store
from toto.syntax import Extract, NameTm, New, NewTag, RNil, TagEntry, TagRef, TagTy, Top, Unit

ROOT = TagEntry(Top())


def case(term, ty, sigma=None, store=EMPTY):
    return TestCase({}, sigma or {}, store, term, ty, 0)


def test_subcontext():
    assert subcontext({}, {0: ROOT})
    assert subcontext({0: ROOT}, {0: ROOT})
    assert not subcontext({0: ROOT}, {0: TagEntry(RNil())})


def test_storecontext():
    assert storecontext_check({}, EMPTY)
    assert storecontext_check({0: ROOT}, Store(((0,),), 1))
    assert not storecontext_check({0: ROOT}, Store(((1,),), 2))
    assert not storecontext_check({1: ROOT}, Store(((1, 0), (0,)), 2))


def test_progress_examples():
    assert check_progress(case(Unit(), Top())).ok
    S0 = Store(((0,),), 1)
    assert check_progress(case(Extract(New(TagRef(0), Unit())), Top(), {0: ROOT}, S0)).ok
    assert not check_progress(case(Extract(Unit()), Top())).ok


def test_preservation_after_allocation():
    c = case(NewTag(Top()), TagTy(Top()))
    v = check_preservation(c)
    assert v.ok and v.sigma_forward is True and v.sigma_backward is False
    assert extend_sigma({}, step(EMPTY, NewTag(Top()))) == {0: ROOT}


def test_preservation_negative_control():
    assert not check_preservation(case(NewTag(Top()), RNil())).ok


def test_value_preservation_is_vacuous():
    assert check_preservation(case(Unit(), Top())).ok


def test_traces_on_generated_cases():
    for seed in case_seeds(5, 150):
        rep = run_trace(gen_typed_term(seed, 4), 200)
        assert rep.ok, rep.failure


def test_negative_controls_are_rejected():
    cases = [gen_typed_term(s, 4) for s in case_seeds(2, 20)]
    controls = negative_controls(cases)
    assert len(controls) == 3 and all(rejected for _, rejected in controls)


def test_corrupted_initial_sigma_is_caught():
    c = gen_typed_term(42, 4)
    bad = replace(c, sigma={**c.sigma, 99: ROOT})
    rep = run_trace(bad)
    assert not rep.ok and not rep.storecontext_ok


def test_selftest_small_run():
    res = run_selftest(cases=20, seed=1, subtype_depth=2)
    assert res.ok, res.text
    assert res.text.endswith("selftest: PASS") and len(res.records) == 20
