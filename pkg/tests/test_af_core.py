import itertools

import pytest

from rankshift import DecorationMap, bratteli, dim_vector, grading_filter
from rankshift.af_core import GeneratorIndex
from rankshift.completion import decorated_words_of_shape
from rankshift.core import add, box_cells, unit


def _enumerated_dims(ts, dmap, m):
    counts = [0] * ts.n_letters
    for dw in decorated_words_of_shape(ts, dmap, m):
        counts[dw.word.terminus] += 1
    return tuple(counts)


def test_dim_vector_shape_zero_identity(gm2):
    dmap = DecorationMap.identity(gm2.alphabet)
    assert dim_vector(gm2, dmap, (0, 0)) == (1, 1, 1, 1)


def test_dim_vector_gm2_headline(gm2):
    dmap = DecorationMap.identity(gm2.alphabet)
    dims = dim_vector(gm2, dmap, (1, 1))
    assert dims == (4, 2, 2, 1)
    assert sum(dims) == 9


def test_dim_vector_fs2_headline(fs2):
    dmap = DecorationMap.identity(fs2.alphabet)
    dims = dim_vector(fs2, dmap, (1, 1))
    assert dims == (4, 4, 4, 4)
    assert sum(dims) == 16


def test_dim_vector_matches_enumeration_small(corpus):
    for name, ts in corpus:
        dmap = DecorationMap.identity(ts.alphabet)
        bound = (2,) * ts.rank
        for m in box_cells(bound):
            assert dim_vector(ts, dmap, m) == _enumerated_dims(ts, dmap, m), \
                (name, m)


def test_dim_vector_respects_decorations(gm):
    dmap = DecorationMap(("x", "y", "z"), (0, 0, 1))
    assert dim_vector(gm, dmap, (0,)) == (2, 1)
    # one step: d_1 = M d_0
    m = gm.matrices[0]
    d0 = (2, 1)
    expected = tuple(sum(m[b][a] * d0[a] for a in range(2)) for b in range(2))
    assert dim_vector(gm, dmap, (1,)) == expected


def test_dim_vector_path_independence(gm2):
    """Any monotone lattice path gives the same counts."""
    dmap = DecorationMap.identity(gm2.alphabet)
    target = (2, 3)

    def along(path):
        d = [0] * gm2.n_letters
        for a in dmap.delta:
            d[a] += 1
        for j in path:
            mat = gm2.matrices[j - 1]
            d = [sum(mat[b][a] * d[a] for a in range(4)) for b in range(4)]
        return tuple(d)

    paths = set()
    for perm in itertools.permutations([1] * target[0] + [2] * target[1]):
        paths.add(perm)
    results = {along(p) for p in paths}
    assert results == {dim_vector(gm2, dmap, target)}


def test_total_counts_factorize_for_tensor(gm, gm2):
    dmap1 = DecorationMap.identity(gm.alphabet)
    dmap2 = DecorationMap.identity(gm2.alphabet)
    for m1 in range(4):
        for m2 in range(4):
            t1 = sum(dim_vector(gm, dmap1, (m1,)))
            t2 = sum(dim_vector(gm, dmap1, (m2,)))
            assert sum(dim_vector(gm2, dmap2, (m1, m2))) == t1 * t2


def test_counts_use_arbitrary_precision(fs2):
    dmap = DecorationMap.identity(fs2.alphabet)
    total = sum(dim_vector(fs2, dmap, (200, 200)))
    assert total == 4 * (2 ** 200) * (2 ** 200)


def test_bratteli_single_level(gm):
    dmap = DecorationMap.identity(gm.alphabet)
    d = bratteli(gm, dmap, (0,))
    assert d.levels() == [(0,)]
    assert d.dims((0,)) == (1, 1)


def test_bratteli_gm_chain(gm):
    dmap = DecorationMap.identity(gm.alphabet)
    d = bratteli(gm, dmap, (2,))
    assert [d.dims(m) for m in d.levels()] == [(1, 1), (2, 1), (3, 2)]
    assert d.edge_multiplicity((0,), 1, 0, 1) == gm.matrices[0][1][0]


def test_bratteli_commuting_squares(corpus):
    """Both composite multiplicity matrices around a lattice cell agree."""
    for name, ts in corpus:
        if ts.rank < 2:
            continue
        n = ts.n_letters
        for i in range(1, ts.rank + 1):
            for j in range(i + 1, ts.rank + 1):
                mi, mj = ts.matrices[i - 1], ts.matrices[j - 1]
                prod_ij = [[sum(mi[b][c] * mj[c][a] for c in range(n))
                            for a in range(n)] for b in range(n)]
                prod_ji = [[sum(mj[b][c] * mi[c][a] for c in range(n))
                            for a in range(n)] for b in range(n)]
                assert prod_ij == prod_ji, (name, i, j)


def test_bratteli_dims_recursion(gm2):
    dmap = DecorationMap.identity(gm2.alphabet)
    d = bratteli(gm2, dmap, (2, 2))
    for m in d.levels():
        for j in (1, 2):
            target = add(m, unit(2, j))
            if target not in d.nodes:
                continue
            mat = gm2.matrices[j - 1]
            expected = tuple(sum(mat[b][a] * d.dims(m)[a] for a in range(4))
                             for b in range(4))
            assert d.dims(target) == expected


def test_bratteli_diagonal(fs2):
    dmap = DecorationMap.identity(fs2.alphabet)
    d = bratteli(fs2, dmap, (2, 2))
    chain = d.diagonal()
    assert [m for m, _ in chain] == [(0, 0), (1, 1), (2, 2)]
    assert [sum(v) for _, v in chain] == [4, 16, 64]


def test_bratteli_exports(gm):
    dmap = DecorationMap.identity(gm.alphabet)
    d = bratteli(gm, dmap, (2,))
    data = d.to_json()
    assert data["levels"][0] == {"shape": [0], "dims": {"0": 1, "1": 1},
                                 "total": 2}
    dot = d.to_dot()
    assert "digraph" in dot
    assert '"0|0" -> "1|0"' in dot
    # rendered twice, identical bytes
    assert dot == bratteli(gm, dmap, (2,)).to_dot()


def test_generator_index_requires_matching_terminus(gm2):
    dmap = DecorationMap.identity(gm2.alphabet)
    words = list(decorated_words_of_shape(gm2, dmap, (1, 0)))
    u = words[0]
    mismatch = next(w for w in words if w.terminus != u.terminus)
    with pytest.raises(ValueError):
        GeneratorIndex(u, mismatch)


def test_grading_filter(gm2):
    dmap = DecorationMap.identity(gm2.alphabet)
    by_shape = {
        (0, 0): list(decorated_words_of_shape(gm2, dmap, (0, 0))),
        (2, 0): list(decorated_words_of_shape(gm2, dmap, (2, 0))),
        (0, 1): list(decorated_words_of_shape(gm2, dmap, (0, 1))),
    }
    pairs = []
    u = by_shape[(0, 0)][0]
    pairs.append(GeneratorIndex(u, u))
    u2 = by_shape[(2, 0)][0]
    v2 = next(w for w in by_shape[(0, 1)] if w.terminus == u2.terminus)
    pairs.append(GeneratorIndex(u2, v2))
    pairs.append(GeneratorIndex(v2, u2))
    part = grading_filter(pairs)
    assert len(part) == len(pairs)
    assert part.classes[(0, 0)] == (pairs[0],)
    assert part.classes[(2, -1)] == (pairs[1],)
    assert part.classes[(-2, 1)] == (pairs[2],)
    assert part.zero_class == (pairs[0],)
    assert pairs[1].grading == (2, -1)
