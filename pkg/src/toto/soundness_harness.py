"""Empirical soundness checks over generated programs.

Progress: every reachable state of a closed well-typed program is a value
or steps.  Preservation: each step keeps the program well typed, at a
subtype of its original type, under a tag context grown by whatever tag
the step allocated, and the grown context still agrees with the store.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field, replace
from typing import Optional

from .dynamics import ALLOCATING_RULES, IsValue, Stepped, Stuck, is_value, step
from .generator import TestCase, construct_histogram, gen_typed_term
from .oracle import DeclarativeSubtyping, differential_sigma, enumerate_types
from .pretty import pretty_ty, pretty_tm
from .tag_store import Store, path_of
from .subtype import is_subtype
from .syntax import Extract, RNil, TagCtx, TagEntry, TagRef, Tagged, Ty, Unit
from .typing import TypeCheckError, check_against, synthesize


# ---------------------------------------------------------------------------
# context relations


def subcontext(sigma1: TagCtx, sigma2: TagCtx) -> bool:
    """Every binding of ``sigma1`` appears unchanged in ``sigma2``."""
    return all(c in sigma2 and sigma2[c] == entry for c, entry in sigma1.items())


def storecontext_check(sigma: TagCtx, S: Store) -> bool:
    """Σ binds exactly the tags heading store entries, with matching parents."""
    if set(sigma) != set(S.tags()):
        return False
    for c, entry in sigma.items():
        p = path_of(c, S)
        want = None if len(p) == 1 else TagRef(p[1])
        if entry.parent != want:
            return False
    return True


def extend_sigma(sigma: TagCtx, out: Stepped) -> TagCtx:
    """Σ after a step: unchanged, or plus the tag the step allocated."""
    if out.rule.rsplit("/", 1)[-1] not in ALLOCATING_RULES:
        return sigma
    path = out.store.entries[0]
    parent = TagRef(path[1]) if len(path) > 1 else None
    grown = dict(sigma)
    grown[path[0]] = TagEntry(out.redex.T, parent)
    return grown


# ---------------------------------------------------------------------------
# single-state checks


@dataclass
class Verdict:
    ok: bool
    detail: str = ""
    rule: Optional[str] = None
    sigma_forward: Optional[bool] = None   # Σ ⊆ Σ'
    sigma_backward: Optional[bool] = None  # Σ' ⊆ Σ, the direction as first stated


def has_type(sigma: TagCtx, e, want: Ty) -> tuple[bool, str]:
    """Does ``e`` have type ``want`` up to subsumption?

    Pair values synthesize a non-dependent sum, so a pair is also checked
    against ``want`` directly, as it would be at any checking position.
    """
    try:
        got = synthesize({}, sigma, e)
    except TypeCheckError as err:
        return False, f"ill-typed: {err.render(pretty_ty)}"
    if is_subtype(got, want, {}, sigma):
        return True, ""
    try:
        check_against({}, sigma, e, want)
    except TypeCheckError:
        return False, f"type {pretty_ty(got)} is not a subtype of {pretty_ty(want)}"
    return True, ""


def check_progress(case: TestCase) -> Verdict:
    if is_value(case.store, case.term):
        return Verdict(True, "value")
    out = step(case.store, case.term)
    if isinstance(out, Stuck):
        return Verdict(False, f"stuck: {out.reason}: {pretty_tm(case.term)}")
    return Verdict(True, "steps", rule=out.rule)


def check_preservation(case: TestCase) -> Verdict:
    out = step(case.store, case.term)
    if isinstance(out, IsValue):
        return Verdict(True, "value")
    if isinstance(out, Stuck):
        return Verdict(False, f"stuck: {out.reason}")
    sigma2 = extend_sigma(case.sigma, out)
    forward, backward = subcontext(case.sigma, sigma2), subcontext(sigma2, case.sigma)
    ok, why = has_type(sigma2, out.term, case.ty)
    if ok and not storecontext_check(sigma2, out.store):
        ok, why = False, "grown tag context disagrees with the store"
    if not ok:
        delta = {c: e for c, e in sigma2.items() if case.sigma.get(c) != e}
        why = (f"{why}; rule {out.rule}; term {pretty_tm(out.term)}; "
               f"expected {pretty_ty(case.ty)}; sigma delta {delta}")
    return Verdict(ok, why, out.rule, forward, backward)


# ---------------------------------------------------------------------------
# whole traces


@dataclass
class CaseReport:
    seed: int
    steps: int
    status: str
    histogram: dict[str, int]
    progress_ok: bool = True
    preservation_ok: bool = True
    storecontext_ok: bool = True
    allocations: int = 0
    backward_subcontext_failures: int = 0
    failure: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.progress_ok and self.preservation_ok and self.storecontext_ok

    def to_json(self) -> dict:
        return {
            "seed": self.seed, "steps": self.steps, "status": self.status,
            "histogram": dict(sorted(self.histogram.items())),
            "progress": self.progress_ok, "preservation": self.preservation_ok,
            "storecontext": self.storecontext_ok, "allocations": self.allocations,
            "backward_subcontext_failures": self.backward_subcontext_failures,
            "failure": self.failure,
        }


def run_trace(case: TestCase, fuel: int = 200) -> CaseReport:
    """Check progress at every state and preservation at every step."""
    rep = CaseReport(case.seed, 0, "Value", construct_histogram(case.term))
    if not storecontext_check(case.sigma, case.store):
        rep.storecontext_ok = False
        rep.failure = "initial tag context disagrees with the store"
        return rep
    cur = case
    for _ in range(fuel):
        pv = check_progress(cur)
        if not pv.ok:
            rep.progress_ok, rep.status, rep.failure = False, "Stuck", pv.detail
            return rep
        if pv.detail == "value":
            rep.status = "Value"
            return rep
        verdict = check_preservation(cur)
        out = step(cur.store, cur.term)
        rep.steps += 1
        if verdict.sigma_backward is False:
            rep.backward_subcontext_failures += 1
        sigma2 = extend_sigma(cur.sigma, out)
        if sigma2 is not cur.sigma:
            rep.allocations += 1
        if not verdict.ok:
            rep.preservation_ok = False
            rep.failure = f"step {rep.steps}: {verdict.detail}"
            return rep
        # The next state keeps the original type as its obligation, so
        # each step is checked against the case type, not a drifting one.
        cur = replace(cur, sigma=sigma2, store=out.store, term=out.term)
    rep.status = "Value" if is_value(cur.store, cur.term) else "OutOfFuel"
    return rep


def negative_controls(cases: list[TestCase]) -> list[tuple[str, bool]]:
    """Three corrupted cases; each must be rejected by the checks."""
    stepping = next(c for c in cases if not is_value(c.store, c.term))
    out = []
    bad_ty = replace(stepping, ty=RNil())
    if isinstance(stepping.ty, RNil):
        bad_ty = replace(stepping, ty=Tagged(TagRef(10_000)))
    out.append(("type replaced", not check_preservation(bad_ty).ok))
    extra = dict(stepping.sigma)
    extra[max(extra) + 1] = TagEntry(RNil())
    bad_sigma = replace(stepping, sigma=extra)
    out.append(("tag context not matching store", not run_trace(bad_sigma).ok))
    stuck = replace(stepping, term=Extract(Unit()), ty=Unit())
    rejected = not check_progress(stuck).ok
    try:
        synthesize({}, stuck.sigma, stuck.term)
        rejected = False  # the control must lie outside the hypotheses
    except TypeCheckError:
        pass
    out.append(("ill-typed Extract of Unit", rejected))
    return out


# ---------------------------------------------------------------------------
# differential subtyping


@dataclass
class DifferentialReport:
    pairs: int
    holds: int
    disagreements: list[tuple[Ty, Ty, bool, bool]]
    universe: int
    levels: int
    seconds: float

    @property
    def ok(self) -> bool:
        return not self.disagreements


def _type_size(T) -> int:
    return len(pretty_ty(T))


def differential_subtyping(tag_count: int = 2, labels=("f", "g"), depth: int = 3) -> DifferentialReport:
    start = time.perf_counter()
    types = enumerate_types(tag_count, list(labels), depth)
    sigma = differential_sigma()
    rel = DeclarativeSubtyping(types, sigma)
    heights = rel.rel[rel.root].height
    ids = [rel.id[T] for T in types]
    gamma: dict = {}
    bad = []
    holds = 0
    for i, A in zip(ids, types):
        for j, B in zip(ids, types):
            alg = is_subtype(A, B, gamma, sigma)
            dec = (i, j) in heights
            holds += alg
            if alg != dec:
                bad.append((A, B, alg, dec))
    # Smallest disagreements first.
    bad.sort(key=lambda q: (_type_size(q[0]) + _type_size(q[1]), pretty_ty(q[0]), pretty_ty(q[1])))
    return DifferentialReport(len(types) ** 2, holds, bad, len(rel.types), rel.levels,
                              time.perf_counter() - start)


# ---------------------------------------------------------------------------
# selftest


def case_seeds(seed: int, n: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.getrandbits(32) for _ in range(n)]


def minimise(seed: int, depth: int, fuel: int) -> int:
    """The smallest generator depth at which ``seed`` still fails."""
    for d in range(0, depth + 1):
        if not run_trace(gen_typed_term(seed, d), fuel).ok:
            return d
    return depth


@dataclass
class SelftestResult:
    ok: bool
    text: str
    records: list[dict] = field(default_factory=list)


def run_selftest(cases: int = 100, seed: int = 0, fuel: int = 200, depth: int = 4,
                 subtype_depth: int = 3) -> SelftestResult:
    lines = []
    diff = differential_subtyping(2, ("f", "g"), subtype_depth)
    lines.append(
        f"differential subtyping: {diff.pairs} pairs over a universe of {diff.universe} types, "
        f"{diff.holds} related, {len(diff.disagreements)} disagreements"
    )
    for A, B, alg, dec in diff.disagreements[:5]:
        lines.append(f"  disagree: {pretty_ty(A)} <: {pretty_ty(B)} algorithmic={alg} declarative={dec}")

    generated = [gen_typed_term(s, depth) for s in case_seeds(seed, cases)]
    reports = [run_trace(c, fuel) for c in generated]
    stuck = [r for r in reports if not r.progress_ok]
    broken = [r for r in reports if not r.preservation_ok or not r.storecontext_ok]
    statuses = {k: sum(r.status == k for r in reports) for k in ("Value", "Stuck", "OutOfFuel")}
    with_match = sum("Match" in r.histogram for r in reports)
    lines.append(
        f"progress: {cases} cases, {sum(r.steps for r in reports)} steps, {len(stuck)} stuck "
        f"(values {statuses['Value']}, out of fuel {statuses['OutOfFuel']}, with Match {with_match})"
    )
    lines.append(
        f"preservation: {len(broken)} failures; tags allocated {sum(r.allocations for r in reports)}; "
        f"steps where Σ' ⊆ Σ fails {sum(r.backward_subcontext_failures for r in reports)}"
    )
    for r in (stuck + broken)[:5]:
        lines.append(f"  seed {r.seed} (minimal depth {minimise(r.seed, depth, fuel)}): {r.failure}")

    controls = negative_controls(generated)
    for name, rejected in controls:
        lines.append(f"negative control '{name}': {'rejected' if rejected else 'NOT rejected'}")

    ok = diff.ok and not stuck and not broken and all(r for _, r in controls)
    lines.append("selftest: " + ("PASS" if ok else "FAIL"))
    return SelftestResult(ok, "\n".join(lines), [r.to_json() for r in reports])


def write_report(path: str, result: SelftestResult) -> None:
    with open(path, "w") as fh:
        for rec in result.records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
