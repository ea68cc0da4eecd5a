"""Forced completion of words: unit extension, staircase words, products.

Under the local conditions (H1a)-(H1c) -- checked by
:func:`rankshift.verify.check_h1_local` -- a word extends uniquely one unit
layer at a time: the new far corner is chosen freely among allowed successors
and every other new cell is forced by a commuting-square constraint.  That
single mechanism yields staircase-determined words, the unique two-word
product, and fast enumeration of extensions.

Independently of any of that, this module also provides brute-force grid
enumeration (:func:`iter_grid_completions`, :func:`words_of_shape`), which
never uses the forced-fill path and therefore serves as its oracle.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .core import (
    CompletionError,
    DecoratedWord,
    DecorationMap,
    Shape,
    TileSystem,
    TransitionError,
    Word,
    WordLike,
    add,
    box_cells,
    box_size,
    letter_word,
    strides,
    unit,
    vec,
    zero,
)

__all__ = [
    "extend_unit", "word_from_path", "product", "list_extensions",
    "iter_grid_completions", "count_grid_completions", "words_of_shape",
    "decorated_words_of_shape", "staircase_steps",
]


def extend_unit(ts: TileSystem, w: Word, j: int, a: int) -> Word:
    """The unique word of shape m + e_j extending w with terminus a.

    Requires M_j(a, t(w)) = 1.  The new layer is filled from the far corner
    backwards; each cell is forced by its already-filled neighbours.  If some
    cell admits no letter, or more than one, the system violates the local
    product conditions and a :class:`CompletionError` reports the offending
    square.
    """
    if not 1 <= j <= ts.rank:
        raise ValueError(f"direction {j} out of range 1..{ts.rank}")
    if not ts.transition(j, w.terminus, a):
        raise TransitionError(
            f"M_{j}({ts.alphabet.name(a)}, {ts.alphabet.name(w.terminus)}) = 0: "
            f"cannot extend in direction {j}")

    old_shape = w.shape
    new_shape = add(old_shape, unit(ts.rank, j))
    new_st = strides(new_shape)
    old_st = strides(old_shape)
    letters = [-1] * box_size(new_shape)

    # copy the old box
    for cell in box_cells(old_shape):
        letters[sum(c * s for c, s in zip(cell, new_st))] = \
            w.letters[sum(c * s for c, s in zip(cell, old_st))]

    # fill the new layer (cells with x_j = m_j + 1) from the far corner back
    layer = sorted(
        (cell for cell in box_cells(new_shape) if cell[j - 1] == new_shape[j - 1]),
        reverse=True)
    far_corner = layer[0]
    full = (1 << ts.n_letters) - 1
    for x in layer:
        below = sum((c - (1 if i == j - 1 else 0)) * s
                    for i, (c, s) in enumerate(zip(x, new_st)))
        mask = ts.successor_mask(j, letters[below])
        if x == far_corner:
            mask &= 1 << a
        for k in range(1, ts.rank + 1):
            if k != j and x[k - 1] < new_shape[k - 1]:
                neighbour = letters[sum(c * s for c, s in zip(x, new_st)) + new_st[k - 1]]
                mask &= ts.predecessor_mask(k, neighbour)
        if mask == 0 or mask & (mask - 1):
            cands = [b for b in range(ts.n_letters) if mask >> b & 1]
            raise CompletionError(
                f"cell {x}: {len(cands)} consistent letters while extending in "
                f"direction {j}; the system violates (H1)", cell=x, candidates=cands)
        letters[sum(c * s for c, s in zip(x, new_st))] = mask.bit_length() - 1
    return Word(new_shape, tuple(letters))


def word_from_path(ts: TileSystem, a0: int, steps: Sequence[tuple[int, int]]) -> Word:
    """The unique word through a staircase of letters.

    ``steps`` is a list of (direction, letter) pairs; step i requires
    M_{j_i}(a_i, a_{i-1}) = 1 and the result has shape sum of the e_{j_i},
    passing through every staircase value.  The index of the first invalid
    step is reported on failure.
    """
    prev = a0
    for i, (j, a) in enumerate(steps):
        if not 1 <= j <= ts.rank:
            raise ValueError(f"step {i}: direction {j} out of range 1..{ts.rank}")
        if not ts.transition(j, prev, a):
            raise TransitionError(
                f"step {i}: M_{j}({ts.alphabet.name(a)}, {ts.alphabet.name(prev)}) = 0")
        prev = a
    w = letter_word(ts.rank, a0)
    for j, a in steps:
        w = extend_unit(ts, w, j, a)
    return w


def staircase_steps(w: Word) -> list[tuple[int, int]]:
    """The canonical staircase of w: direction 1 first, then 2, and so on.

    Returns (direction, letter) pairs suitable for :func:`word_from_path`
    starting from o(w).
    """
    steps = []
    pos = list(zero(w.rank))
    for j in range(1, w.rank + 1):
        for _ in range(w.shape[j - 1]):
            pos[j - 1] += 1
            steps.append((j, w.at(pos)))
    return steps


def product(ts: TileSystem, u: WordLike, v: Word) -> WordLike:
    """The unique word w with w|[0,m] = u and w|[m,m+n] = v.

    Requires t(u) = o(v).  A decorated u carries its decoration to the
    product.  Implemented by extending u along the staircase of v, one forced
    unit layer per step.
    """
    if isinstance(u, DecoratedWord):
        return DecoratedWord(u.decoration, product(ts, u.word, v))
    if u.terminus != v.origin:
        raise TransitionError(
            f"t(u) = {ts.alphabet.name(u.terminus)} != "
            f"o(v) = {ts.alphabet.name(v.origin)}: product undefined")
    w = u
    for j, a in staircase_steps(v):
        w = extend_unit(ts, w, j, a)
    return w


def list_extensions(ts: TileSystem, u: WordLike, n: Shape
                    ) -> list[tuple[Word, WordLike]]:
    """All words w of shape n with o(w) = t(u), each paired with u w.

    Results come in the canonical order: lexicographic over the row-major
    letters of w.
    """
    n = vec(n)
    if len(n) != ts.rank:
        raise ValueError(f"shape {n} has wrong rank")
    return [(w, product(ts, u, w))
            for w in words_of_shape(ts, n, origin=u.terminus)]


# ---------------------------------------------------------------------------
# brute-force grid enumeration (independent of the forced-fill machinery)
# ---------------------------------------------------------------------------

def _grid_plan(ts: TileSystem, shape: Shape):
    """Per-cell (flat predecessor index, direction) constraint lists."""
    st = strides(shape)
    plan = []
    for cell in box_cells(shape):
        idx = sum(c * s for c, s in zip(cell, st))
        preds = tuple((idx - st[j - 1], j) for j in range(1, len(shape) + 1)
                      if cell[j - 1] > 0)
        plan.append(preds)
    return plan


def iter_grid_completions(ts: TileSystem, shape: Shape,
                          fixed: dict[int, int] | None = None,
                          limit: int | None = None) -> Iterator[tuple[int, ...]]:
    """All valid letter grids on [0, shape] extending a partial assignment.

    ``fixed`` maps flat row-major cell indices to letter indices.  Grids are
    produced in lexicographic order of their full row-major tuple; cells are
    assigned one by one with every constraint towards already-assigned
    neighbours enforced, so the search is exact.
    """
    shape = vec(shape)
    plan = _grid_plan(ts, shape)
    n_cells = len(plan)
    fixed = fixed or {}
    full = (1 << ts.n_letters) - 1
    assign = [-1] * n_cells
    produced = 0

    # iterative DFS over cells in row-major order
    stack: list[list[int]] = []

    def candidates(i: int) -> list[int]:
        mask = full
        if i in fixed:
            mask &= 1 << fixed[i]
        for p, j in plan[i]:
            mask &= ts.successor_mask(j, assign[p])
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out

    i = 0
    stack.append(candidates(0))
    while stack:
        if limit is not None and produced >= limit:
            return
        options = stack[-1]
        if not options:
            stack.pop()
            i -= 1
            continue
        assign[i] = options.pop(0)
        if i == n_cells - 1:
            produced += 1
            yield tuple(assign)
            continue
        i += 1
        stack.append(candidates(i))


def count_grid_completions(ts: TileSystem, shape: Shape,
                           fixed: dict[int, int] | None = None,
                           limit: int | None = None) -> int:
    n = 0
    for _ in iter_grid_completions(ts, shape, fixed, limit):
        n += 1
    return n


def words_of_shape(ts: TileSystem, shape: Shape,
                   origin: int | None = None,
                   terminus: int | None = None) -> Iterator[Word]:
    """All words of the given shape, lexicographic in row-major letters.

    Optional origin/terminus filters fix the first/last cell.
    """
    shape = vec(shape)
    fixed = {}
    if origin is not None:
        fixed[0] = origin
    if terminus is not None:
        fixed[box_size(shape) - 1] = terminus
    for letters in iter_grid_completions(ts, shape, fixed):
        yield Word(shape, letters)


def decorated_words_of_shape(ts: TileSystem, dmap: DecorationMap, shape: Shape,
                             terminus: int | None = None) -> Iterator[DecoratedWord]:
    """All decorated words of the given shape, word-major canonical order."""
    groups = dmap.by_letter(ts.n_letters)
    for w in words_of_shape(ts, shape, terminus=terminus):
        for d in groups[w.origin]:
            yield DecoratedWord(d, w)
