"""Constructive witnesses: connectors, distinct pairs, aperiodic words,
translate-separating extensions, and the separating family indexing the
projection support.

Everything here assumes the system passes (H0)-(H2) (and, for the deeper
constructions, that bounded (H3) searches succeed); run
:func:`rankshift.verify.verify_report` first when in doubt.  All searches are
graded with declaration-order tie-breaks, so outputs are deterministic.
"""

from __future__ import annotations

from collections import deque
from typing import Iterator

from .core import (
    DecorationMap,
    DecoratedWord,
    Shape,
    TileSystem,
    Translate,
    WitnessSearchError,
    Word,
    add,
    box_cells,
    compositions,
    dominates,
    is_zero,
    join,
    letter_word,
    neg,
    restrict,
    strides,
    sub,
    translate_reps,
    translates_agree,
    vec,
    zero,
)
from .completion import (
    extend_unit,
    product,
    word_from_path,
    words_of_shape,
)
from .verify import h3_bounded_witnesses

__all__ = [
    "connect", "grow_to_shape", "distinct_pair", "nonperiodic_all",
    "separate_translates", "separating_family", "projection_support",
]


def connect(ts: TileSystem, a: int, b: int, n_min: Shape) -> Word:
    """A word w with o(w) = a, t(w) = b and shape(w) >= n_min.

    Breadth-first search over (letter, progress-clamped-at-n_min) states
    finds a shortest qualifying staircase; ties break by direction then
    letter order.  Unreachable letters mean the system fails (H2).
    """
    n_min = vec(n_min)
    if len(n_min) != ts.rank:
        raise ValueError("minimum shape has wrong rank")
    start = (a, zero(ts.rank))
    goal = (b, n_min)
    if start == goal:
        return letter_word(ts.rank, a)
    parents: dict[tuple[int, Shape], tuple] = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        c, prog = state
        for j in range(1, ts.rank + 1):
            bumped = tuple(min(x + (1 if i == j - 1 else 0), n)
                           for i, (x, n) in enumerate(zip(prog, n_min)))
            for c2 in ts.successors(j, c):
                nxt = (c2, bumped)
                if nxt in parents:
                    continue
                parents[nxt] = (state, j, c2)
                if nxt == goal:
                    steps = []
                    cur = nxt
                    while parents[cur] is not None:
                        prev, jj, letter = parents[cur]
                        steps.append((jj, letter))
                        cur = prev
                    steps.reverse()
                    return word_from_path(ts, a, steps)
                queue.append(nxt)
    raise WitnessSearchError(
        f"letter {ts.alphabet.name(b)} unreachable from {ts.alphabet.name(a)} "
        f"with shape >= {n_min}; the system fails (H2)")


def grow_to_shape(ts: TileSystem, w: Word, target: Shape) -> Word:
    """Extend w to exact shape target >= shape(w), greedily.

    Each unit extension uses the lexicographically first allowed letter,
    direction 1 first.  Under (H0)-(H2) every letter has a successor in
    every direction, so the greedy walk cannot get stuck.
    """
    target = vec(target)
    if not dominates(target, w.shape):
        raise ValueError(f"target {target} does not dominate shape {w.shape}")
    while w.shape != target:
        for j in range(1, ts.rank + 1):
            if w.shape[j - 1] < target[j - 1]:
                succ = ts.successors(j, w.terminus)
                if not succ:
                    raise WitnessSearchError(
                        f"letter {ts.alphabet.name(w.terminus)} has no successor "
                        f"in direction {j}; the system fails (H2)")
                w = extend_unit(ts, w, j, succ[0])
                break
    return w


def _shapes_by_grade(rank: int, max_grade: int) -> Iterator[Shape]:
    for grade in range(1, max_grade + 1):
        yield from compositions(grade, rank)


def distinct_pair(ts: TileSystem, max_grade: int = 4) -> tuple[Word, Word]:
    """Two different words of equal shape and equal origin.

    Graded search: shapes by total size (direction 1 major), origins in
    declaration order, words in canonical order; the first two hits win.
    Exhausting the bound is reported as evidence against (H3): it means
    every word is determined by its origin and shape.
    """
    for shape in _shapes_by_grade(ts.rank, max_grade):
        for c in range(ts.n_letters):
            found = []
            for w in words_of_shape(ts, shape, origin=c):
                found.append(w)
                if len(found) == 2:
                    return found[0], found[1]
    raise WitnessSearchError(
        f"no two distinct words of equal shape and origin up to total size "
        f"{max_grade}; evidence against (H3)")


def nonperiodic_all(ts: TileSystem, m: Shape, a: int,
                    shape_bound: Shape | None = None) -> Word:
    """A word from letter a that is non-p-periodic for every p != 0, |p| <= m.

    Per-p witnesses are found by bounded search (default bound m + 2 in every
    direction) and concatenated with connecting spacers; a word containing a
    non-p-periodic sub-box is itself non-p-periodic, so every requirement
    survives the concatenation.  m = 0 has nothing to defeat and returns the
    single-letter word.
    """
    m = vec(m)
    if len(m) != ts.rank:
        raise ValueError("translate bound has wrong rank")
    if is_zero(m):
        return letter_word(ts.rank, a)
    if shape_bound is None:
        shape_bound = tuple(c + 2 for c in m)
    parts = list(h3_bounded_witnesses(ts, m, shape_bound).values())
    w = connect(ts, a, parts[0].origin, zero(ts.rank))
    for i, part in enumerate(parts):
        w = product(ts, w, part)
        if i + 1 < len(parts):
            spacer = connect(ts, part.terminus, parts[i + 1].origin, zero(ts.rank))
            w = product(ts, w, spacer)
    return w


def separate_translates(ts: TileSystem, p: Translate, w1: Word, w2: Word
                        ) -> tuple[Word, Word]:
    """Extend w1, w2 to a common shape on which tau_p(w1') differs from w2'.

    A distinct pair (u, v) with equal shape and origin is spliced onto w1
    behind a spacer s chosen so that the spliced box lands at
    p + shape(w1) + shape(s) >= 0 inside w2'; whichever of u, v differs from
    what w2' shows there forces the disagreement, which then survives any
    further padding.  The overlap of the two extensions is never empty.
    """
    p = vec(p)
    if w1.shape != w2.shape:
        raise ValueError(f"shapes differ: {w1.shape} vs {w2.shape}")
    if len(p) != w1.rank:
        raise ValueError("translate has wrong rank")
    u, v = distinct_pair(ts)
    spacer_min = join(neg(add(p, w1.shape)), zero(ts.rank))
    s = connect(ts, w1.terminus, u.origin, spacer_min)
    base = add(p, add(w1.shape, s.shape))
    upper = add(base, u.shape)
    w2pp = grow_to_shape(ts, w2, join(w2.shape, upper))
    shown = restrict(w2pp, base, upper)
    pick = v if shown == u else u
    w1pp = product(ts, product(ts, w1, s), pick)
    common = join(w1pp.shape, w2pp.shape)
    w1p = grow_to_shape(ts, w1pp, common)
    w2p = grow_to_shape(ts, w2pp, common)
    return w1p, w2p


def _all_nonzero_translates(m: Shape) -> list[Translate]:
    out = []
    for p in translate_reps(m):
        out.append(p)
        out.append(neg(p))
    return out


def separating_family(ts: TileSystem, m: Shape,
                      shape_bound: Shape | None = None
                      ) -> tuple[Shape, dict[int, Word]]:
    """A common-shape family {w_a} with all small translates separated.

    Returns (l, family) where family[a] is a word of shape l with origin a,
    and for all letters a, b and every p != 0 with |p| <= m the words w_a and
    tau_p(w_b) disagree somewhere on their overlap.  Starts from words that
    defeat every small period, then repairs violating (a, b, p) triples with
    :func:`separate_translates`; established disagreements persist under
    extension, so one pass over the triples suffices.  The result is
    re-verified before returning.
    """
    m = vec(m)
    n = ts.n_letters
    family = {a: nonperiodic_all(ts, m, a, shape_bound) for a in range(n)}
    l = zero(ts.rank)
    for w in family.values():
        l = join(l, w.shape)
    family = {a: grow_to_shape(ts, w, l) for a, w in family.items()}

    translates = _all_nonzero_translates(m)
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            for p in translates:
                if not translates_agree(family[a], family[b], p):
                    continue
                wb, wa = separate_translates(ts, p, family[b], family[a])
                family[b], family[a] = wb, wa
                l = wa.shape
                family = {c: grow_to_shape(ts, w, l) for c, w in family.items()}

    for a in range(n):
        if family[a].origin != a:
            raise WitnessSearchError("separating family lost an origin")
        for b in range(n):
            for p in translates:
                if translates_agree(family[a], family[b], p):
                    raise WitnessSearchError(
                        f"separating family failed for letters "
                        f"({ts.alphabet.name(a)}, {ts.alphabet.name(b)}), p={p}")
    return l, family


def projection_support(ts: TileSystem, dmap: DecorationMap, m: Shape,
                       l: Shape, family: dict[int, Word],
                       total: Shape | None = None) -> list[DecoratedWord]:
    """Decorated words of shape ``total`` whose [m, m+l] window lies in the family.

    With the default total = m + l this is the index set of the projection
    built from the separating family; larger totals realise its refinements,
    whose support consists exactly of the extensions of the base support.

    The enumeration is a direct grid search (it never uses the forced-fill
    machinery): cells are assigned row-major under the transition
    constraints, and cells inside the window additionally track which family
    members still match, so mismatching grids are abandoned early.
    """
    m = vec(m)
    l = vec(l)
    window_hi = add(m, l)
    if total is None:
        total = window_hi
    total = vec(total)
    if not dominates(total, window_hi):
        raise ValueError(f"total shape {total} must dominate m + l = {window_hi}")
    members = [family[a] for a in sorted(family)]
    if any(w.shape != l for w in members):
        raise ValueError(f"family members must all have the common shape {l}")
    groups = dmap.by_letter(ts.n_letters)
    out = []
    for w in _window_constrained_words(ts, total, m, l, members):
        for d in groups[w.origin]:
            out.append(DecoratedWord(d, w))
    return out


def _window_constrained_words(ts: TileSystem, total: Shape, lo: Shape,
                              l: Shape, members: list[Word]) -> Iterator[Word]:
    """Valid grids on [0, total] whose [lo, lo+l] window equals some member."""
    st = strides(total)
    cells = list(box_cells(total))
    n_cells = len(cells)
    rank = len(total)
    hi = add(lo, l)
    # per-cell predecessor constraints and, inside the window, the letter each
    # member shows there
    preds: list[tuple[tuple[int, int], ...]] = []
    window_letters: list[tuple[int, ...] | None] = []
    for cell in cells:
        idx_preds = tuple((sum(c * s for c, s in zip(cell, st)) - st[j - 1], j)
                          for j in range(1, rank + 1) if cell[j - 1] > 0)
        preds.append(idx_preds)
        if all(a <= c <= b for a, c, b in zip(lo, cell, hi)):
            y = sub(cell, lo)
            window_letters.append(tuple(w.at(y) for w in members))
        else:
            window_letters.append(None)

    full = (1 << ts.n_letters) - 1
    assign = [-1] * n_cells

    def options_at(i: int, alive: int) -> list[tuple[int, int]]:
        """Letter choices for cell i as (letter, surviving member mask)."""
        mask = full
        for p, j in preds[i]:
            mask &= ts.successor_mask(j, assign[p])
        shown = window_letters[i]
        if shown is None:
            opts = []
            while mask:
                low = mask & -mask
                opts.append((low.bit_length() - 1, alive))
                mask ^= low
            return opts
        per_letter: dict[int, int] = {}
        while alive:
            low = alive & -alive
            letter = shown[low.bit_length() - 1]
            if mask >> letter & 1:
                per_letter[letter] = per_letter.get(letter, 0) | low
            alive ^= low
        return sorted(per_letter.items())

    i = 0
    stack = [options_at(0, (1 << len(members)) - 1)]
    while stack:
        opts = stack[-1]
        if not opts:
            stack.pop()
            i -= 1
            continue
        letter, alive = opts.pop(0)
        assign[i] = letter
        if i == n_cells - 1:
            yield Word(total, tuple(assign))
            continue
        i += 1
        stack.append(options_at(i, alive))
