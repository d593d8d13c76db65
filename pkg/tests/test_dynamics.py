from toto.dynamics import IsValue, Stepped, Stuck, evaluate, is_value, step
from toto.parser import parse_program
from toto.tag_store import EMPTY, Store
from toto.syntax import (
    App, Extract, Fix, Fold, Lam, Match, Mu, NameTm, New, NewTag, Pair, Proj,
    RConsTm, RNilTm, SubTag, TagRef, Top, Unit, Var,
)

S0 = Store(((0,),), 1)
S10 = Store(((1, 0), (0,)), 2)


def test_values():
    assert is_value(EMPTY, Unit())
    assert is_value(S0, NameTm(TagRef(0)))
    assert not is_value(EMPTY, NameTm(TagRef(0)))
    assert is_value(EMPTY, Fold(Mu("t", Top()), Unit()))
    assert is_value(EMPTY, Pair(Unit(), RConsTm("f", Unit(), RNilTm())))
    assert not is_value(EMPTY, Pair(Unit(), Extract(Unit())))


def test_r_cls():
    out = step(EMPTY, NewTag(Top()))
    assert out == Stepped(S0, NameTm(TagRef(0)), "r_cls", NewTag(Top()))


def test_r_ccls():
    out = step(S0, SubTag(Top(), TagRef(0)))
    assert (out.store, out.term, out.rule) == (S10, NameTm(TagRef(1)), "r_ccls")


def test_r_matchsuc_substitutes_scrutinee():
    e = Match(New(TagRef(1), Unit()), TagRef(0), "y", NameTm(Var("y")), Unit())
    out = step(S10, e)
    assert (out.store, out.term, out.rule) == (S10, New(TagRef(1), Unit()), "r_matchsuc")


def test_r_matchfail():
    e = Match(New(TagRef(0), Unit()), TagRef(1), "y", NameTm(Var("y")), RNilTm())
    out = step(S10, e)
    assert (out.term, out.rule) == (RNilTm(), "r_matchfail")


def test_r_untag2():
    out = step(S0, Extract(New(TagRef(0), Unit())))
    assert (out.store, out.term, out.rule) == (S0, Unit(), "r_untag2")


def test_value_does_not_step():
    assert step(EMPTY, Unit()) == IsValue()


def test_stuck_states():
    assert isinstance(step(EMPTY, Extract(Unit())), Stuck)
    assert isinstance(step(EMPTY, App(Unit(), Unit())), Stuck)
    assert isinstance(step(EMPTY, Proj(RNilTm(), "f")), Stuck)
    assert isinstance(step(EMPTY, NameTm(Var("x"))), Stuck)
    assert isinstance(step(EMPTY, SubTag(Top(), TagRef(4))), Stuck)


def test_congruence_names_chain():
    e = Pair(Unit(), Extract(New(TagRef(0), Unit())))
    assert step(S0, e).rule == "r_pair2/r_untag2"


def test_allocation_inside_context_is_threaded():
    e = Pair(NewTag(Top()), NewTag(Top()))
    run = evaluate(EMPTY, e)
    assert run.term == Pair(NameTm(TagRef(0)), NameTm(TagRef(1)))
    assert run.store.entries == ((1,), (0,))


def test_example_program():
    prog = parse_program("Let x be NewTag[Top] in Extract{New{< >}(x)}")
    run = evaluate(prog.store, prog.main)
    assert run.status == "Value" and run.term == Unit()
    assert [r for r, _, _ in run.trace] == ["r_let/r_cls", "r_letv", "r_untag2"]
    assert run.store.inline() == "#0 -> ."


def test_fuel_zero_on_value():
    run = evaluate(EMPTY, Unit(), 0)
    assert run.status == "Value" and run.trace == []


def test_divergence_runs_out_of_fuel():
    loop = Fix(Lam("x", Top(), App(NameTm(Var("x")), Unit())))
    run = evaluate(EMPTY, loop, 10)
    assert run.status == "OutOfFuel" and run.steps == 10


def test_stuck_evaluation_reports_reason():
    run = evaluate(EMPTY, Extract(Unit()))
    assert run.status == "Stuck" and "Extract" in run.reason
