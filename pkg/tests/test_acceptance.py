"""The eight acceptance criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""

import functools
import glob
import os
import subprocess
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from rawgen import Raw, TYVARS
from toto.dynamics import evaluate
from toto.generator import gen_typed_term
from toto.parser import parse_program, parse_tm, pretty_program
from toto.pretty import pretty_tm
from toto.soundness_harness import (
    case_seeds, differential_subtyping, negative_controls, run_trace, storecontext_check,
)
from toto.substitution import subst_tm, subst_tyvar
from toto.syntax import Let, Match, Mu, NameTm, Unit, free_vars
from toto.typing import ErrorKind, TypeCheckError, synthesize

HERE = os.path.dirname(os.path.abspath(__file__))
CORPUS = os.path.join(HERE, "corpus")
N_CASES = 1000
LAW_INSTANCES = 1000


def report(capsys, number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


@functools.lru_cache(maxsize=None)
def soundness_run():
    start = time.perf_counter()
    cases = [gen_typed_term(s, 4) for s in case_seeds(0, N_CASES)]
    reports = [run_trace(c, 200) for c in cases]
    return cases, reports, time.perf_counter() - start


def criterion_1(capsys=None):
    diff = differential_subtyping(2, ("f", "g"), 3)
    ok = diff.ok and diff.seconds < 60
    detail = (f"{diff.pairs} pairs, {len(diff.disagreements)} disagreements, "
              f"{diff.holds} related, {diff.seconds:.1f}s")
    if diff.disagreements:
        A, B, alg, dec = diff.disagreements[0]
        detail += f"; smallest: {A} <: {B} algorithmic={alg} declarative={dec}"
    report(capsys, 1, "differential subtyping", ok, detail)
    return ok


def criterion_2(capsys=None):
    cases, reports, secs = soundness_run()
    typed = all(synthesize({}, c.sigma, c.term) is not None and storecontext_check(c.sigma, c.store)
                for c in cases)
    stuck = [r for r in reports if not r.progress_ok]
    steps = sum(r.steps for r in reports)
    ok = typed and not stuck and len(cases) >= 1000 and secs < 120
    detail = f"{len(cases)} cases, {steps} states re-checked, {len(stuck)} stuck, {secs:.1f}s"
    if stuck:
        detail += f"; first: seed {stuck[0].seed} {stuck[0].failure}"
    report(capsys, 2, "empirical progress", ok, detail)
    return ok


def criterion_3(capsys=None):
    cases, reports, _ = soundness_run()
    broken = [r for r in reports if not (r.preservation_ok and r.storecontext_ok)]
    controls = negative_controls(cases)
    allocs = sum(r.allocations for r in reports)
    backward = sum(r.backward_subcontext_failures for r in reports)
    ok = not broken and len(controls) == 3 and all(rej for _, rej in controls)
    detail = (f"{len(broken)} failures over {sum(r.steps for r in reports)} steps; "
              f"{allocs} allocations, reverse inclusion fails at {backward}; controls "
              + ", ".join(f"{n}={'rejected' if r else 'ACCEPTED'}" for n, r in controls))
    if broken:
        detail += f"; first: seed {broken[0].seed} {broken[0].failure}"
    report(capsys, 3, "empirical preservation", ok, detail)
    return ok


RULES = [
    "r_cls", "r_ccls", "r_new", "r_match", "r_matchsuc", "r_matchfail", "r_untag1", "r_untag2",
    "r_rcdproj", "r_projrcd", "r_rcdhead", "r_rcdtail", "r_letv", "r_let", "r_fixb", "r_fix",
    "r_unfldfld", "r_unfld", "r_fld", "r_pairv1", "r_pairv2", "r_proj1", "r_proj2", "r_pair1",
    "r_pair2", "r_app1", "r_app2", "r_appabs",
]


def _cli(*args) -> subprocess.CompletedProcess:
    return subprocess.run([sys.executable, "-m", "toto", *args], capture_output=True)


def criterion_4(capsys=None):
    programs = sorted(glob.glob(os.path.join(CORPUS, "*.toto")))
    mismatched, missing = [], []
    for path in programs:
        out = _cli("eval", "--trace", path)
        with open(path[:-5] + ".trace", "rb") as fh:
            if out.returncode != 0 or out.stdout != fh.read():
                mismatched.append(os.path.basename(path))
    for rule in RULES:
        path = os.path.join(CORPUS, rule + ".toto")
        if not os.path.exists(path):
            missing.append(rule)
            continue
        prog = parse_program(open(path).read())
        fired = {r for name, _, _ in evaluate(prog.store, prog.main).trace for r in name.split("/")}
        if rule not in fired:
            missing.append(rule)
    ok = len(programs) >= 20 and not mismatched and not missing
    detail = f"{len(programs)} programs, {len(RULES)} rules covered, {len(mismatched)} trace mismatches"
    if mismatched or missing:
        detail += f"; mismatched {mismatched} uncovered {missing}"
    report(capsys, 4, "rule conformance corpus", ok, detail)
    return ok


DECLS = "tag #0 : Top\ntag #1 : Top extends #0\ntag #3 : Top\n"


def criterion_5(capsys=None):
    def run(scrut, pattern):
        prog = parse_program(DECLS + f"Match{{New{{< >}}({scrut})}}({pattern})(y){{Extract{{y}}}}{{< >}}")
        try:
            synthesize({}, prog.sigma, prog.main)
        except TypeCheckError as err:
            return err.kind
        return [r for r, _, _ in evaluate(prog.store, prog.main).trace]

    hit, unrelated, miss = run("#1", "#0"), run("#1", "#3"), run("#0", "#1")
    ok = (hit == ["r_matchsuc", "r_untag2"] and unrelated is ErrorKind.NoMutualSupertype
          and miss == ["r_matchfail"])
    detail = f"#1 vs #0 -> {hit}; #1 vs #3 -> {getattr(unrelated, 'value', unrelated)}; #0 vs #1 -> {miss}"
    report(capsys, 5, "match end to end", ok, detail)
    return ok


def criterion_6(capsys=None):
    fails = {"identity": 0, "match shadowing": 0, "mu shadowing": 0}
    for i in range(LAW_INSTANCES):
        g = Raw(i)
        x, s, t = g.var(), g.tm(3), g.tm(4)
        if x in free_vars(t):
            t = Let(x, Unit(), t)
        fails["identity"] += subst_tm(x, s, t) != t
        s_name = NameTm(g.name())
        fails["identity"] += subst_tm(x, s_name, t) != t

        e1, e2, e3 = g.tm(3), g.tm(3), g.tm(3)
        out = subst_tm(x, s, Match(e1, g.name(), x, e2, e3))
        fails["match shadowing"] += not (
            out.hit == e2 and out.scrutinee == subst_tm(x, s, e1) and out.miss == subst_tm(x, s, e3)
        )

        tv = g.rng.choice(TYVARS)
        mu = Mu(tv, g.ty(4))
        fails["mu shadowing"] += subst_tyvar(tv, g.ty(3), mu) != mu
    ok = not any(fails.values())
    detail = f"{LAW_INSTANCES} instances per law, failures {fails}"
    report(capsys, 6, "substitution laws", ok, detail)
    return ok


def criterion_7(capsys=None):
    diffs = []
    for path in sorted(glob.glob(os.path.join(CORPUS, "*.toto")))[:10]:
        for flags in (["--json"], ["--trace"]):
            a, b = _cli("eval", *flags, path), _cli("eval", *flags, path)
            if (a.stdout, a.returncode) != (b.stdout, b.returncode):
                diffs.append(os.path.basename(path))
    first = _cli("selftest", "--cases", "100", "--seed", "7")
    second = _cli("selftest", "--cases", "100", "--seed", "7")
    same = first.stdout == second.stdout and first.returncode == second.returncode == 0
    ok = same and not diffs
    detail = (f"eval byte-identical on 10 programs x 2 flag sets ({len(diffs)} differ); "
              f"selftest --cases 100 --seed 7 identical={first.stdout == second.stdout}, "
              f"exit {first.returncode}")
    report(capsys, 7, "determinism", ok, detail)
    return ok


def criterion_8(capsys=None):
    bad = 0
    for i in range(N_CASES):
        e = Raw(10_000 + i).tm(5)
        bad += parse_tm(pretty_tm(e)) != e
    files = sorted(glob.glob(os.path.join(CORPUS, "*.toto")) + glob.glob(os.path.join(CORPUS, "*.reject")))
    bad_files = []
    for path in files:
        prog = parse_program(open(path).read())
        again = parse_program(pretty_program(prog))
        if (again.main, again.sigma, again.store) != (prog.main, prog.sigma, prog.store):
            bad_files.append(os.path.basename(path))
    ok = bad == 0 and not bad_files
    detail = f"{N_CASES} generated terms ({bad} differ), {len(files)} corpus files ({len(bad_files)} differ)"
    report(capsys, 8, "parser round trip", ok, detail)
    return ok


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_acceptance(criterion, capsys):
    assert criterion(capsys)


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
