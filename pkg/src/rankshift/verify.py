"""Decision procedures for the axioms (H0)-(H3) of a tile system.

    (H0)   every transition matrix is nonzero;
    (H1)   composable words have a unique common extension (the product);
    (H2)   the combined transition graph on the alphabet is irreducible;
    (H3)   for every translate p != 0 some word is not p-periodic.

(H1) is decided exactly by the local matrix conditions

    (H1a)  M_i M_j = M_j M_i,
    (H1b)  M_i M_j has entries in {0,1} for i < j,
    (H1c)  M_i M_j M_k has entries in {0,1} for i < j < k,

which :func:`check_h1_local` verifies; :func:`check_h1_oracle` independently
brute-forces the unique-extension statement on bounded shapes.  (H3) has no
known terminating decision procedure, but the strengthened condition (H3*)
-- every direction-j extension fiber has at least two letters -- is decidable
by a fixed-point computation over fiber sets (:func:`check_h3_star`) and
implies (H3).  :func:`check_h3_bounded` searches for explicit non-periodic
witnesses within bounds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .core import (
    Shape,
    TileSystem,
    Translate,
    WitnessSearchError,
    Word,
    absv,
    box_cells,
    dominates,
    is_periodic,
    is_zero,
    shapes_upto,
    strides,
    sub,
    translate_reps,
    vec,
)
from .completion import iter_grid_completions, word_from_path, words_of_shape

__all__ = [
    "Status", "CheckResult", "VerificationReport", "FiberFamily",
    "check_h0", "check_h1_local", "check_h1_oracle", "check_h2",
    "check_h3_star", "check_h3_bounded", "verify_report",
    "fiber_transfer_round",
]


class Status(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    BOUNDED_PASS = "bounded-pass"
    SKIPPED = "skipped"
    CAP_HIT = "cap-hit"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one condition check.

    A fail always carries a checkable witness payload; params records the
    bounds the check ran with.
    """

    condition: str
    status: Status
    witness: object = None
    params: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status in (Status.PASS, Status.BOUNDED_PASS)

    def to_json(self) -> dict:
        out = {"condition": self.condition, "status": self.status.value,
               "params": dict(self.params)}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.status is not Status.FAIL for c in self.checks)

    def __getitem__(self, condition: str) -> CheckResult:
        for c in self.checks:
            if c.condition == condition:
                return c
        raise KeyError(condition)

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": [c.to_json() for c in self.checks]}


def _word_json(ts: TileSystem, w: Word) -> dict:
    return {"shape": list(w.shape),
            "cells": [ts.alphabet.name(a) for a in w.letters]}


# ---------------------------------------------------------------------------
# (H0), (H1)
# ---------------------------------------------------------------------------

def check_h0(ts: TileSystem) -> CheckResult:
    """Every matrix has at least one 1-entry."""
    for j, mat in enumerate(ts.matrices, start=1):
        if not any(any(row) for row in mat):
            return CheckResult("H0", Status.FAIL, {"direction": j})
    return CheckResult("H0", Status.PASS)


def _matmul(p, q):
    n = len(p)
    return [[sum(p[b][c] * q[c][a] for c in range(n)) for a in range(n)]
            for b in range(n)]


def check_h1_local(ts: TileSystem) -> CheckResult:
    """The local product conditions (H1a), (H1b), (H1c).

    The first violation in scan order is reported with the offending matrix
    entry and its value.
    """
    n = ts.n_letters
    names = ts.alphabet.letters
    mats = [list(map(list, m)) for m in ts.matrices]
    for i in range(1, ts.rank + 1):
        for j in range(i + 1, ts.rank + 1):
            pij = _matmul(mats[i - 1], mats[j - 1])
            pji = _matmul(mats[j - 1], mats[i - 1])
            for b in range(n):
                for a in range(n):
                    if pij[b][a] != pji[b][a]:
                        return CheckResult("H1a-c", Status.FAIL, {
                            "kind": "H1a", "i": i, "j": j,
                            "b": names[b], "a": names[a],
                            "values": [pij[b][a], pji[b][a]]})
                    if pij[b][a] > 1:
                        return CheckResult("H1a-c", Status.FAIL, {
                            "kind": "H1b", "i": i, "j": j,
                            "b": names[b], "a": names[a],
                            "value": pij[b][a]})
            for k in range(j + 1, ts.rank + 1):
                pijk = _matmul(pij, mats[k - 1])
                for b in range(n):
                    for a in range(n):
                        if pijk[b][a] > 1:
                            return CheckResult("H1a-c", Status.FAIL, {
                                "kind": "H1c", "i": i, "j": j, "k": k,
                                "b": names[b], "a": names[a],
                                "value": pijk[b][a]})
    return CheckResult("H1a-c", Status.PASS)


def _split_completions(ts: TileSystem, total: Shape, m: Shape,
                       u: Word, v: Word, limit: int) -> list[Word]:
    """Completions w on [0, total] with w|[0,m] = u, w|[m,total] = v."""
    st = strides(total)
    fixed: dict[int, int] = {}
    for cell in box_cells(m):
        fixed[sum(c * s for c, s in zip(cell, st))] = u.at(cell)
    for cell in box_cells(v.shape):
        flat = sum((c + o) * s for c, o, s in zip(cell, m, st))
        fixed[flat] = v.at(cell)
    return [Word(total, letters)
            for letters in iter_grid_completions(ts, total, fixed, limit=limit)]


def check_h1_oracle(ts: TileSystem, shape_bound: Shape) -> CheckResult:
    """Brute-force the unique-extension statement on bounded shapes.

    For every composable pair (u, v) with shape(u) + shape(v) <= shape_bound
    the number of common extensions is counted by exhaustive grid search and
    must be exactly one.  Splits where u or v has shape 0 are provably
    trivial (the extension is the other word) and are skipped.  Intended as
    an independent oracle for :func:`check_h1_local`; never calls the forced
    fill.
    """
    shape_bound = vec(shape_bound)
    if len(shape_bound) != ts.rank:
        raise ValueError("shape bound has wrong rank")
    params = {"shape_bound": list(shape_bound)}
    for total in shapes_upto(shape_bound):
        if is_zero(total):
            continue
        for m in box_cells(total):
            n = sub(total, m)
            if is_zero(m) or is_zero(n):
                continue
            by_origin: dict[int, list[Word]] = {}
            for v in words_of_shape(ts, n):
                by_origin.setdefault(v.origin, []).append(v)
            for u in words_of_shape(ts, m):
                for v in by_origin.get(u.terminus, ()):
                    found = _split_completions(ts, total, m, u, v, limit=2)
                    if len(found) != 1:
                        witness = {
                            "u": _word_json(ts, u), "v": _word_json(ts, v),
                            "split": list(m), "total": list(total),
                            "completions": len(found) if len(found) < 2 else ">=2",
                        }
                        if found:
                            witness["examples"] = [_word_json(ts, w) for w in found]
                        return CheckResult("H1 (oracle)", Status.FAIL,
                                           witness, params)
    return CheckResult("H1 (oracle)", Status.PASS, params=params)


# ---------------------------------------------------------------------------
# (H2)
# ---------------------------------------------------------------------------

def _strong_components(succ: list[list[int]]) -> list[list[int]]:
    """Strongly connected components, deterministic (Kosaraju, index order)."""
    n = len(succ)
    pred: list[list[int]] = [[] for _ in range(n)]
    for a, outs in enumerate(succ):
        for b in outs:
            pred[b].append(a)
    order: list[int] = []
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        stack = [(start, iter(succ[start]))]
        seen[start] = True
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if not seen[nxt]:
                    seen[nxt] = True
                    stack.append((nxt, iter(succ[nxt])))
                    advanced = True
                    break
            if not advanced:
                order.append(node)
                stack.pop()
    comp = [-1] * n
    components: list[list[int]] = []
    for start in reversed(order):
        if comp[start] != -1:
            continue
        members = []
        stack2 = [start]
        comp[start] = len(components)
        while stack2:
            node = stack2.pop()
            members.append(node)
            for nxt in pred[node]:
                if comp[nxt] == -1:
                    comp[nxt] = len(components)
                    stack2.append(nxt)
        components.append(sorted(members))
    components.sort(key=lambda ms: ms[0])
    return components


def check_h2(ts: TileSystem) -> CheckResult:
    """Irreducibility of the combined transition graph.

    The graph has a vertex per letter and an edge a -> b whenever some
    direction allows the step.  Pass means every ordered pair of letters is
    joined by a path of positive length; a fail reports the partition into
    strongly connected components.
    """
    n = ts.n_letters
    succ = [sorted({b for j in range(1, ts.rank + 1) for b in ts.successors(j, a)})
            for a in range(n)]
    components = _strong_components(succ)
    if len(components) == 1 and (n > 1 or succ[0]):
        return CheckResult("H2", Status.PASS)
    witness = {"components": [[ts.alphabet.name(a) for a in c] for c in components]}
    return CheckResult("H2", Status.FAIL, witness)


# ---------------------------------------------------------------------------
# (H3*) via the fiber-set fixed point
# ---------------------------------------------------------------------------

@dataclass
class FiberFamily:
    """All distinct direction-j extension fiber sets, grouped by origin.

    For a word w whose shape has component zero in direction j, its fiber is
    the set of letters that extensions of w one unit in direction j can place
    at e_j.  ``sets_by_origin[c]`` lists, in discovery order, every fiber set
    realised by words with origin c; ``provenance`` remembers for each
    (origin, fiber) the staircase that produced it so witnesses can be
    rebuilt as actual words.
    """

    direction: int
    sets_by_origin: dict[int, list[frozenset[int]]]
    provenance: dict[tuple[int, frozenset[int]], tuple]

    def all_sets(self) -> Iterator[tuple[int, frozenset[int]]]:
        for c in sorted(self.sets_by_origin):
            for s in self.sets_by_origin[c]:
                yield c, s

    def witness_path(self, origin: int, fiber: frozenset[int]) -> list[tuple[int, int]]:
        """The (direction, letter) staircase generating a recorded fiber."""
        steps = []
        key = (origin, fiber)
        while True:
            step, parent = self.provenance[key]
            if step is None:
                return steps
            steps.append(step)
            key = parent

    def to_json(self, ts: TileSystem) -> dict:
        return {
            "direction": self.direction,
            "fibers": {
                ts.alphabet.name(c): [sorted(ts.alphabet.name(a) for a in s)
                                      for s in sets_]
                for c, sets_ in sorted(self.sets_by_origin.items())
            },
        }


def _seed_fiber(ts: TileSystem, j: int, c: int) -> frozenset[int]:
    return frozenset(ts.successors(j, c))


def _transfer(ts: TileSystem, j: int, k: int, c_new: int,
              fiber: frozenset[int]) -> frozenset[int]:
    """Fiber of v w from the fiber of w, where v is the unit step c_new -> c."""
    out = []
    for a in ts.successors(j, c_new):
        for b in fiber:
            if ts.transition(k, a, b):
                out.append(a)
                break
    return frozenset(out)


def fiber_transfer_round(ts: TileSystem, family: FiberFamily
                         ) -> list[tuple[int, frozenset[int]]]:
    """Apply one full transfer round; return pairs not already in the family.

    Empty output certifies that the family is a fixed point.
    """
    j = family.direction
    known = {(c, s) for c, sets_ in family.sets_by_origin.items() for s in sets_}
    new = []
    for c, fiber in list(known):
        for k in range(1, ts.rank + 1):
            if k == j:
                continue
            for c_new in ts.predecessors(k, c):
                t = _transfer(ts, j, k, c_new, fiber)
                if (c_new, t) not in known and (c_new, t) not in set(new):
                    new.append((c_new, t))
    new.sort(key=lambda p: (p[0], sorted(p[1])))
    return new


def check_h3_star(ts: TileSystem, j: int, max_sets: int = 100_000
                  ) -> tuple[CheckResult, FiberFamily]:
    """Decide (H3*) in direction j by the fiber-set fixed point.

    Seeds with the fiber of every single letter, then closes under the
    transfer rule along unit steps in every other direction.  Pass iff every
    discovered fiber has at least two letters; a fail reports the first small
    fiber together with the word generating it.  Termination is guaranteed
    (finitely many subsets), but ``max_sets`` caps runaway growth on large
    alphabets and a cap hit is reported as its own status.
    """
    if not 1 <= j <= ts.rank:
        raise ValueError(f"direction {j} out of range 1..{ts.rank}")
    params = {"direction": j, "max_sets": max_sets}
    sets_by_origin: dict[int, list[frozenset[int]]] = {c: [] for c in range(ts.n_letters)}
    provenance: dict[tuple[int, frozenset[int]], tuple] = {}
    family = FiberFamily(j, sets_by_origin, provenance)
    queue: list[tuple[int, frozenset[int]]] = []
    total = 0

    def small_fiber_result(c, fiber):
        steps = family.witness_path(c, fiber)
        word = word_from_path(ts, c, steps)
        witness = {
            "origin": ts.alphabet.name(c),
            "fiber": sorted(ts.alphabet.name(a) for a in fiber),
            "word": _word_json(ts, word),
        }
        return CheckResult(f"H3* (j={j})", Status.FAIL, witness, params)

    def insert(c, fiber, step, parent):
        nonlocal total
        if fiber in sets_by_origin[c]:
            return None
        sets_by_origin[c].append(fiber)
        provenance[(c, fiber)] = (step, parent)
        queue.append((c, fiber))
        total += 1
        return (c, fiber)

    def cap_hit():
        return (CheckResult(f"H3* (j={j})", Status.CAP_HIT,
                            {"sets_discovered": total}, params), family)

    for c in range(ts.n_letters):
        key = insert(c, _seed_fiber(ts, j, c), None, None)
        if key and len(key[1]) < 2:
            return small_fiber_result(*key), family
        if total > max_sets:
            return cap_hit()

    head = 0
    while head < len(queue):
        c, fiber = queue[head]
        head += 1
        for k in range(1, ts.rank + 1):
            if k == j:
                continue
            for c_new in ts.predecessors(k, c):
                t = _transfer(ts, j, k, c_new, fiber)
                key = insert(c_new, t, (k, c), (c, fiber))
                if key is None:
                    continue
                if len(t) < 2:
                    return small_fiber_result(c_new, t), family
                if total > max_sets:
                    return cap_hit()
    return CheckResult(f"H3* (j={j})", Status.PASS, params=params), family


# ---------------------------------------------------------------------------
# bounded (H3) search
# ---------------------------------------------------------------------------

def nonperiodic_witness(ts: TileSystem, p: Translate, shape_bound: Shape
                        ) -> Optional[Word]:
    """First word (canonical order) within the bound that is not p-periodic.

    Only shapes l with |p| <= l <= shape_bound can carry a witness: smaller
    boxes have empty overlap with their p-translate.
    """
    lo = absv(p)
    if not dominates(shape_bound, lo):
        return None
    for l in shapes_upto(shape_bound):
        if not dominates(l, lo):
            continue
        for w in words_of_shape(ts, l):
            if not is_periodic(w, p):
                return w
    return None


def check_h3_bounded(ts: TileSystem, p_bound: Shape, shape_bound: Shape
                     ) -> CheckResult:
    """Search for a non-p-periodic word for every p with |p| <= p_bound.

    p ranges over representatives modulo p <-> -p (periodicity is symmetric).
    Bounded-pass lists one witness per p; a fail means some p has no witness
    within shape_bound, which is inconclusive for (H3) globally and is
    reported as such.
    """
    p_bound = vec(p_bound)
    shape_bound = vec(shape_bound)
    params = {"p_bound": list(p_bound), "shape_bound": list(shape_bound)}
    witnesses = {}
    missing = []
    for p in translate_reps(p_bound):
        w = nonperiodic_witness(ts, p, shape_bound)
        if w is None:
            missing.append(list(p))
        else:
            witnesses[",".join(map(str, p))] = _word_json(ts, w)
    if missing:
        return CheckResult("H3 (bounded)", Status.FAIL,
                           {"no_witness_for": missing,
                            "note": "inconclusive for (H3) globally"},
                           params)
    return CheckResult("H3 (bounded)", Status.BOUNDED_PASS,
                       {"witnesses": witnesses}, params)


def h3_bounded_witnesses(ts: TileSystem, p_bound: Shape, shape_bound: Shape
                         ) -> dict[Translate, Word]:
    """Witness words per canonical p, raising if any p has none in bounds."""
    out = {}
    missing = []
    for p in translate_reps(vec(p_bound)):
        w = nonperiodic_witness(ts, p, vec(shape_bound))
        if w is None:
            missing.append(p)
        else:
            out[p] = w
    if missing:
        raise WitnessSearchError(
            f"no non-periodic witness within shape bound {tuple(shape_bound)} "
            f"for translates {missing}")
    return out


# ---------------------------------------------------------------------------
# aggregate report
# ---------------------------------------------------------------------------

def verify_report(ts: TileSystem,
                  h1_oracle_bound: Shape | None = None,
                  h3_p_bound: Shape | None = None,
                  h3_shape_bound: Shape | None = None,
                  h3_star_cap: int = 100_000) -> VerificationReport:
    """Run every check and aggregate the results.

    The (H3*) and bounded (H3) machinery is only meaningful when the local
    product conditions hold, so those checks are marked skipped when
    (H1a)-(H1c) fail.  Defaults: oracle bound (2,...,2), p bound (2,...,2),
    shape bound p bound + (1,...,1).
    """
    r = ts.rank
    h1_oracle_bound = vec(h1_oracle_bound) if h1_oracle_bound else (2,) * r
    h3_p_bound = vec(h3_p_bound) if h3_p_bound else (2,) * r
    if h3_shape_bound:
        h3_shape_bound = vec(h3_shape_bound)
    else:
        h3_shape_bound = tuple(b + 1 for b in h3_p_bound)

    checks = [check_h0(ts)]
    h1 = check_h1_local(ts)
    checks.append(h1)
    checks.append(check_h1_oracle(ts, h1_oracle_bound))
    checks.append(check_h2(ts))
    if h1.ok:
        for j in range(1, r + 1):
            result, _ = check_h3_star(ts, j, max_sets=h3_star_cap)
            checks.append(result)
        checks.append(check_h3_bounded(ts, h3_p_bound, h3_shape_bound))
    else:
        for j in range(1, r + 1):
            checks.append(CheckResult(f"H3* (j={j})", Status.SKIPPED,
                                      {"reason": "(H1a)-(H1c) failed"}))
        checks.append(CheckResult("H3 (bounded)", Status.SKIPPED,
                                  {"reason": "(H1a)-(H1c) failed"}))
    return VerificationReport(tuple(checks))
