"""Combinatorial data of the graded filtration: a Bratteli diagram.

The level at shape m splits into blocks by terminus letter, and the block
sizes are the counts of decorated words of shape m per terminus.  Counts
obey the matrix recursion

    d_0(a)       = #{d in D : delta(d) = a}
    d_{m + e_j}  = M_j d_m

because a word of shape m + e_j is determined by its restriction to [0, m]
plus one allowed terminus step (forced fill).  Inclusion multiplicities from
level m to m + e_j are exactly the matrix entries M_j(b, a), and the two
composite multiplicity matrices around any lattice square agree because the
matrices commute.  Counts are kept as Python integers, so exponential growth
cannot overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    DecorationMap,
    DecoratedWord,
    Shape,
    TileSystem,
    Translate,
    add,
    dominates,
    shape_key,
    shapes_upto,
    sub,
    unit,
    vec,
    zero,
)

__all__ = ["dim_vector", "BratteliDiagram", "bratteli",
           "GeneratorIndex", "GradingPartition", "grading_filter"]


def _mat_vec(mat, v):
    return tuple(sum(row[a] * v[a] for a in range(len(v))) for row in mat)


def dim_vector(ts: TileSystem, dmap: DecorationMap, m: Shape) -> tuple[int, ...]:
    """Counts of decorated words of shape m, indexed by terminus letter.

    Computed by the matrix recursion, not enumeration; any monotone path
    from 0 to m gives the same answer since the matrices commute.
    """
    m = vec(m)
    if len(m) != ts.rank:
        raise ValueError(f"shape {m} has wrong rank")
    d = [0] * ts.n_letters
    for a in dmap.delta:
        d[a] += 1
    d = tuple(d)
    for j in range(1, ts.rank + 1):
        for _ in range(m[j - 1]):
            d = _mat_vec(ts.matrices[j - 1], d)
    return d


@dataclass(frozen=True)
class BratteliDiagram:
    """Graded diagram of the filtration blocks on the box [0, upto].

    Nodes are pairs (level shape m, letter a) carrying the count of decorated
    words of shape m with terminus a; the edge multiplicity from (m, a) to
    (m + e_j, b) is M_j(b, a).
    """

    system: TileSystem
    decorations: DecorationMap
    upto: Shape
    nodes: dict[Shape, tuple[int, ...]] = field(compare=False)

    def dims(self, m: Shape) -> tuple[int, ...]:
        return self.nodes[vec(m)]

    def total(self, m: Shape) -> int:
        return sum(self.dims(m))

    def levels(self) -> list[Shape]:
        return sorted(self.nodes, key=shape_key)

    def edge_multiplicity(self, m: Shape, j: int, a: int, b: int) -> int:
        m = vec(m)
        if not dominates(self.upto, add(m, unit(len(m), j))):
            raise ValueError(f"no level {m} + e_{j} inside [0, {self.upto}]")
        return self.system.matrices[j - 1][b][a]

    def diagonal(self) -> list[tuple[Shape, tuple[int, ...]]]:
        """The chain of levels along multiples of (1, ..., 1)."""
        out = []
        m = zero(len(self.upto))
        ones = tuple(1 for _ in self.upto)
        while dominates(self.upto, m):
            out.append((m, self.nodes[m]))
            m = add(m, ones)
        return out

    def to_json(self) -> dict:
        names = self.system.alphabet.letters
        levels = [{"shape": list(m),
                   "dims": {names[a]: d for a, d in enumerate(self.nodes[m])},
                   "total": sum(self.nodes[m])}
                  for m in self.levels()]
        edges = []
        for m in self.levels():
            for j in range(1, self.system.rank + 1):
                if not dominates(self.upto, add(m, unit(self.system.rank, j))):
                    continue
                edges.append({
                    "from": list(m), "direction": j,
                    "multiplicities": [list(row)
                                       for row in self.system.matrices[j - 1]],
                })
        return {"alphabet": list(names), "upto": list(self.upto),
                "levels": levels, "edges": edges}

    def to_dot(self) -> str:
        """Graphviz text: one node per (level, letter) labelled with its count."""
        names = self.system.alphabet.letters
        lines = ["digraph bratteli {", "  rankdir=BT;"]

        def node_id(m, a):
            return '"%s|%s"' % (",".join(map(str, m)), names[a])

        for m in self.levels():
            dims = self.nodes[m]
            lines.append("  // level (%s): dims (%s) total %d" % (
                ",".join(map(str, m)), ",".join(map(str, dims)), sum(dims)))
            for a, d in enumerate(dims):
                lines.append("  %s [label=\"%s:%d\"];" % (node_id(m, a), names[a], d))
        for m in self.levels():
            for j in range(1, self.system.rank + 1):
                target = add(m, unit(self.system.rank, j))
                if not dominates(self.upto, target):
                    continue
                mat = self.system.matrices[j - 1]
                for a in range(len(names)):
                    for b in range(len(names)):
                        if mat[b][a]:
                            lines.append("  %s -> %s [label=\"%d\"];" % (
                                node_id(m, a), node_id(target, b), mat[b][a]))
        lines.append("}")
        return "\n".join(lines)


def bratteli(ts: TileSystem, dmap: DecorationMap, upto: Shape) -> BratteliDiagram:
    """The full graded diagram on [0, upto]."""
    upto = vec(upto)
    if len(upto) != ts.rank:
        raise ValueError(f"bound {upto} has wrong rank")
    nodes = {m: dim_vector(ts, dmap, m) for m in shapes_upto(upto)}
    return BratteliDiagram(ts, dmap, upto, nodes)


@dataclass(frozen=True)
class GeneratorIndex:
    """An index pair (u, v) of decorated words with matching terminus.

    Carries the grading shape(u) - shape(v); no operator semantics attached.
    """

    u: DecoratedWord
    v: DecoratedWord

    def __post_init__(self):
        if self.u.terminus != self.v.terminus:
            raise ValueError("generator index requires t(u) = t(v)")

    @property
    def grading(self) -> Translate:
        return sub(self.u.shape, self.v.shape)


@dataclass(frozen=True)
class GradingPartition:
    """Generator indices grouped by grading, zero class flagged.

    The zero-grading class collects the equal-shape pairs; it is flagged
    because the equal-shape pairs are exactly the ones that every level of
    the filtration diagram can index on its own.
    """

    classes: dict[Translate, tuple[GeneratorIndex, ...]] = field(compare=False)

    @property
    def zero_class(self) -> tuple[GeneratorIndex, ...]:
        for g, members in self.classes.items():
            if all(c == 0 for c in g):
                return members
        return ()

    def __len__(self):
        return sum(len(v) for v in self.classes.values())


def grading_filter(pairs) -> GradingPartition:
    """Partition generator indices by their grading."""
    classes: dict[Translate, list[GeneratorIndex]] = {}
    for gi in pairs:
        classes.setdefault(gi.grading, []).append(gi)
    ordered = {g: tuple(members) for g, members in
               sorted(classes.items(), key=lambda kv: (sum(abs(c) for c in kv[0]), kv[0]))}
    return GradingPartition(ordered)
