"""Command-line interface and the JSON system file format.

A system file looks like

    {
      "rank": 2,
      "alphabet": ["00", "01", "10", "11"],
      "matrices": [ [[...], ...], [[...], ...] ],
      "decorations": {"names": ["d0", "d1"], "delta": ["00", "10"]}
    }

``matrices[j][b][a] = 1`` means the step  a -> b  in direction j+1 is
allowed (rows are indexed by the target letter).  Files written with the
opposite convention load correctly with ``--transpose``.  ``decorations``
is optional and defaults to the identity decoration D = A.

Exit codes: 0 = success / all checks passed, 1 = a check failed or a
witness search came back negative (with evidence printed), 2 = usage or
input error.  All output is byte-deterministic for fixed input and flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import af_core, builders, verify, witnesses
from .core import (
    Alphabet,
    DecorationMap,
    DecoratedWord,
    Shape,
    SubshiftError,
    TileSystem,
    Word,
    validate_word,
    vec,
)
from .completion import (
    decorated_words_of_shape,
    extend_unit,
    product,
    words_of_shape,
)

__all__ = ["load_system", "save_system", "main", "console_main", "SystemFileError"]


class SystemFileError(SubshiftError):
    """A system file failed to parse or validate; message names the field."""


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

def _require(cond, message):
    if not cond:
        raise SystemFileError(message)


def load_system(path, transpose: bool = False) -> tuple[TileSystem, DecorationMap]:
    """Load a system file; returns the system and its decoration map."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SystemFileError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise SystemFileError(f"{path}: invalid JSON at line {exc.lineno}, "
                              f"column {exc.colno}: {exc.msg}") from exc
    return parse_system(data, transpose=transpose, origin=str(path))


def parse_system(data, transpose: bool = False, origin: str = "<data>"
                 ) -> tuple[TileSystem, DecorationMap]:
    _require(isinstance(data, dict), f"{origin}: top level must be an object")
    for key in ("rank", "alphabet", "matrices"):
        _require(key in data, f"{origin}: missing field {key!r}")
    rank = data["rank"]
    _require(isinstance(rank, int) and rank >= 1,
             f"{origin}: 'rank' must be an integer >= 1")
    letters = data["alphabet"]
    _require(isinstance(letters, list) and letters
             and all(isinstance(a, str) for a in letters),
             f"{origin}: 'alphabet' must be a nonempty list of strings")
    _require(len(set(letters)) == len(letters),
             f"{origin}: 'alphabet' has duplicate letters")
    alphabet = Alphabet(letters)
    n = len(letters)

    matrices = data["matrices"]
    _require(isinstance(matrices, list) and len(matrices) == rank,
             f"{origin}: 'matrices' must list exactly rank={rank} matrices")
    parsed = []
    for j, mat in enumerate(matrices):
        _require(isinstance(mat, list) and len(mat) == n,
                 f"{origin}: matrices[{j}] is not {n}x{n}")
        rows = []
        for b, row in enumerate(mat):
            _require(isinstance(row, list) and len(row) == n,
                     f"{origin}: matrices[{j}][{b}] is not a row of length {n}")
            for a, e in enumerate(row):
                _require(e in (0, 1),
                         f"{origin}: matrices[{j}][{b}][{a}] is {e!r}, "
                         f"entries must be 0 or 1")
            rows.append(row)
        if transpose:
            rows = [[rows[a][b] for a in range(n)] for b in range(n)]
        parsed.append(rows)

    if "decorations" in data and data["decorations"] is not None:
        deco = data["decorations"]
        _require(isinstance(deco, dict) and "names" in deco and "delta" in deco,
                 f"{origin}: 'decorations' must have 'names' and 'delta'")
        names = deco["names"]
        delta_names = deco["delta"]
        _require(isinstance(names, list) and names
                 and all(isinstance(d, str) for d in names),
                 f"{origin}: decorations.names must be a nonempty string list")
        _require(isinstance(delta_names, list) and len(delta_names) == len(names),
                 f"{origin}: decorations.delta must align with decorations.names")
        delta = []
        for i, a in enumerate(delta_names):
            _require(a in letters,
                     f"{origin}: decorations.delta[{i}] = {a!r} "
                     f"is not an alphabet letter")
            delta.append(alphabet.resolve(a))
        dmap = DecorationMap(tuple(names), tuple(delta))
    else:
        dmap = DecorationMap.identity(alphabet)
    return TileSystem(alphabet, parsed), dmap


def system_to_json(ts: TileSystem, dmap: DecorationMap | None = None) -> dict:
    data = {
        "rank": ts.rank,
        "alphabet": list(ts.alphabet.letters),
        "matrices": [[list(row) for row in mat] for mat in ts.matrices],
    }
    if dmap is not None and dmap != DecorationMap.identity(ts.alphabet):
        data["decorations"] = {
            "names": list(dmap.names),
            "delta": [ts.alphabet.name(a) for a in dmap.delta],
        }
    return data


def save_system(ts: TileSystem, path, dmap: DecorationMap | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(system_to_json(ts, dmap), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# small formatting helpers
# ---------------------------------------------------------------------------

def _parse_shape(text: str, rank: int, what: str = "shape") -> Shape:
    try:
        parts = vec(int(p) for p in text.split(","))
    except ValueError:
        raise SystemFileError(f"cannot parse {what} {text!r}; "
                              f"expected comma-separated integers") from None
    if len(parts) != rank:
        raise SystemFileError(f"{what} {text!r} has {len(parts)} components, "
                              f"system rank is {rank}")
    return parts


def _format_shape(s: Sequence[int]) -> str:
    return ",".join(map(str, s))


def _format_word(ts: TileSystem, w, dmap: DecorationMap | None = None) -> str:
    if isinstance(w, DecoratedWord):
        name = dmap.names[w.decoration] if dmap else str(w.decoration)
        return (f"decoration={name} shape={_format_shape(w.word.shape)} "
                f"cells={w.word.render(ts.alphabet)}")
    return f"shape={_format_shape(w.shape)} cells={w.render(ts.alphabet)}"


def _word_arg(ts: TileSystem, shape_text: str, cells_text: str) -> Word:
    shape = _parse_shape(shape_text, ts.rank)
    cells = cells_text.split(",") if cells_text else []
    return validate_word(ts, cells, shape=shape)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_verify(args) -> int:
    ts, _ = load_system(args.system, transpose=args.transpose)
    r = ts.rank
    report = verify.verify_report(
        ts,
        h1_oracle_bound=_parse_shape(args.h1_oracle_bound, r, "--h1-oracle-bound")
        if args.h1_oracle_bound else None,
        h3_p_bound=_parse_shape(args.h3_p_bound, r, "--h3-p-bound")
        if args.h3_p_bound else None,
        h3_shape_bound=_parse_shape(args.h3_shape_bound, r, "--h3-shape-bound")
        if args.h3_shape_bound else None,
        h3_star_cap=args.h3_star_cap,
    )
    if args.json:
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        for check in report.checks:
            line = f"{check.condition}: {check.status}"
            if check.status is verify.Status.FAIL and check.witness is not None:
                line += "  witness: " + json.dumps(check.witness, sort_keys=True)
            print(line)
        print("result: " + ("ok" if report.ok else "FAILED"))
    return 0 if report.ok else 1


def _cmd_count(args) -> int:
    ts, dmap = load_system(args.system, transpose=args.transpose)
    shape = _parse_shape(args.shape, ts.rank)
    dims = af_core.dim_vector(ts, dmap, shape)
    total = sum(dims)
    if args.json:
        print(json.dumps({"shape": list(shape), "total": total,
                          "per_letter": {ts.alphabet.name(a): d
                                         for a, d in enumerate(dims)}},
                         sort_keys=True))
    elif args.per_letter:
        parts = [f"{ts.alphabet.name(a)}:{d}" for a, d in enumerate(dims)]
        print(" ".join(parts + [f"total:{total}"]))
    else:
        print(f"total:{total}")
    return 0


def _cmd_enumerate(args) -> int:
    ts, dmap = load_system(args.system, transpose=args.transpose)
    shape = _parse_shape(args.shape, ts.rank)
    origin = ts.alphabet.resolve(args.origin) if args.origin else None
    terminus = ts.alphabet.resolve(args.terminus) if args.terminus else None
    count = 0
    if args.decorated:
        source = decorated_words_of_shape(ts, dmap, shape, terminus=terminus)
        if origin is not None:
            source = (dw for dw in source if dw.word.origin == origin)
    else:
        source = words_of_shape(ts, shape, origin=origin, terminus=terminus)
    for w in source:
        if args.limit is not None and count >= args.limit:
            print(f"... truncated at --limit {args.limit}")
            break
        print(_format_word(ts, w, dmap))
        count += 1
    print(f"count:{count}")
    return 0


def _cmd_extend(args) -> int:
    ts, _ = load_system(args.system, transpose=args.transpose)
    w = _word_arg(ts, args.shape, args.cells)
    a = ts.alphabet.resolve(args.letter)
    out = extend_unit(ts, w, args.direction, a)
    print(_format_word(ts, out))
    return 0


def _cmd_product(args) -> int:
    ts, _ = load_system(args.system, transpose=args.transpose)
    u = _word_arg(ts, args.shape1, args.cells1)
    v = _word_arg(ts, args.shape2, args.cells2)
    print(_format_word(ts, product(ts, u, v)))
    return 0


def _witness_gate(ts: TileSystem) -> None:
    for check in (verify.check_h0(ts), verify.check_h1_local(ts),
                  verify.check_h2(ts)):
        if not check.ok:
            raise SubshiftError(
                f"witness machinery requires (H0)-(H2); {check.condition} failed: "
                f"{json.dumps(check.witness, sort_keys=True)}")


def _cmd_witness_nonperiodic(args) -> int:
    ts, _ = load_system(args.system, transpose=args.transpose)
    _witness_gate(ts)
    p_bound = _parse_shape(args.p_bound, ts.rank, "--p-bound")
    origin = ts.alphabet.resolve(args.origin) if args.origin else 0
    bound = (_parse_shape(args.shape_bound, ts.rank, "--shape-bound")
             if args.shape_bound else None)
    w = witnesses.nonperiodic_all(ts, p_bound, origin, bound)
    print(_format_word(ts, w))
    return 0


def _cmd_witness_connect(args) -> int:
    ts, _ = load_system(args.system, transpose=args.transpose)
    _witness_gate(ts)
    a = ts.alphabet.resolve(args.origin)
    b = ts.alphabet.resolve(args.terminus)
    n_min = _parse_shape(args.min_shape, ts.rank, "--min-shape")
    print(_format_word(ts, witnesses.connect(ts, a, b, n_min)))
    return 0


def _cmd_witness_distinct_pair(args) -> int:
    ts, _ = load_system(args.system, transpose=args.transpose)
    _witness_gate(ts)
    u, v = witnesses.distinct_pair(ts, max_grade=args.max_grade)
    print(_format_word(ts, u))
    print(_format_word(ts, v))
    return 0


def _cmd_witness_set_s(args) -> int:
    ts, _ = load_system(args.system, transpose=args.transpose)
    _witness_gate(ts)
    m = _parse_shape(args.p_bound, ts.rank, "--p-bound")
    bound = (_parse_shape(args.shape_bound, ts.rank, "--shape-bound")
             if args.shape_bound else None)
    l, family = witnesses.separating_family(ts, m, bound)
    print(f"common-shape:{_format_shape(l)}")
    for a in range(ts.n_letters):
        print(f"{ts.alphabet.name(a)} {_format_word(ts, family[a])}")
    return 0


def _cmd_witness_q_support(args) -> int:
    ts, dmap = load_system(args.system, transpose=args.transpose)
    _witness_gate(ts)
    m = _parse_shape(args.p_bound, ts.rank, "--p-bound")
    bound = (_parse_shape(args.shape_bound, ts.rank, "--shape-bound")
             if args.shape_bound else None)
    l, family = witnesses.separating_family(ts, m, bound)
    total = (_parse_shape(args.total, ts.rank, "--total")
             if args.total else None)
    support = witnesses.projection_support(ts, dmap, m, l, family, total=total)
    print(f"common-shape:{_format_shape(l)}")
    print(f"support-size:{len(support)}")
    for dw in support:
        print(_format_word(ts, dw, dmap))
    return 0


def _cmd_bratteli(args) -> int:
    ts, dmap = load_system(args.system, transpose=args.transpose)
    upto = _parse_shape(args.upto, ts.rank, "--upto")
    diagram = af_core.bratteli(ts, dmap, upto)
    if args.format == "json":
        print(json.dumps(diagram.to_json(), indent=2, sort_keys=True))
    elif args.format == "dot":
        print(diagram.to_dot())
    else:
        for m in diagram.levels():
            dims = diagram.nodes[m]
            print(f"level {_format_shape(m)}: dims ({_format_shape(dims)}) "
                  f"total {sum(dims)}")
    if args.chain:
        for m, dims in diagram.diagonal():
            print(f"chain {_format_shape(m)}: ({_format_shape(dims)})")
    return 0


def _cmd_tensor(args) -> int:
    factors = []
    for path in args.factors:
        ts, _ = load_system(path, transpose=args.transpose)
        factors.append(ts)
    result = builders.tensor(factors)
    save_system(result, args.output)
    print(f"wrote rank-{result.rank} system with {result.n_letters} letters "
          f"to {args.output}")
    return 0


def _cmd_redecorate(args) -> int:
    ts, dmap = load_system(args.system, transpose=args.transpose)
    assignments = {}
    for item in args.map.split(";"):
        if not item:
            continue
        name, _, shape_text = item.partition("=")
        if name not in dmap.names:
            raise SystemFileError(f"--map names unknown decoration {name!r}")
        assignments[name] = _parse_shape(shape_text, ts.rank, f"--map[{name}]")
    missing = [d for d in dmap.names if d not in assignments]
    if missing:
        raise SystemFileError(f"--map missing decorations: {missing}")
    new_map, words = builders.redecorate_by_shape(ts, dmap, assignments)
    if args.output:
        save_system(ts, args.output, new_map)
        print(f"wrote {len(new_map)} decorations to {args.output}")
    for name, a, dw in zip(new_map.names, new_map.delta, words):
        print(f"{name} -> {ts.alphabet.name(a)}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankshift",
        description="Rank-r subshifts of finite type: verification, counting, "
                    "enumeration and witness construction.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("system", help="system JSON file")
        p.add_argument("--transpose", action="store_true",
                       help="matrices in the file use the b -> a convention")

    p = sub.add_parser("verify", help="run the (H0)-(H3*) checks")
    common(p)
    p.add_argument("--h1-oracle-bound", metavar="S",
                   help="shape bound for the brute-force (H1) oracle "
                        "(default 2,...,2)")
    p.add_argument("--h3-p-bound", metavar="S",
                   help="largest |p| searched for non-periodic witnesses "
                        "(default 2,...,2)")
    p.add_argument("--h3-shape-bound", metavar="S",
                   help="largest word shape searched per p "
                        "(default p bound + 1)")
    p.add_argument("--h3-star-cap", type=int, default=100_000,
                   help="max fiber sets before the (H3*) run reports cap-hit "
                        "(default %(default)s)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("count", help="count decorated words of a shape")
    common(p)
    p.add_argument("--shape", required=True, metavar="S")
    p.add_argument("--per-letter", action="store_true",
                   help="break the count down by terminus letter")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("enumerate", help="list words of a shape")
    common(p)
    p.add_argument("--shape", required=True, metavar="S")
    p.add_argument("--origin", metavar="A")
    p.add_argument("--terminus", metavar="B")
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--decorated", action="store_true")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("extend", help="extend a word one unit")
    common(p)
    p.add_argument("--shape", required=True, metavar="S")
    p.add_argument("--cells", required=True,
                   help="row-major letters, comma-separated")
    p.add_argument("--direction", type=int, required=True, metavar="J")
    p.add_argument("--letter", required=True, metavar="A",
                   help="new terminus letter")
    p.set_defaults(func=_cmd_extend)

    p = sub.add_parser("product", help="the unique product of two words")
    common(p)
    p.add_argument("--shape1", required=True)
    p.add_argument("--cells1", required=True)
    p.add_argument("--shape2", required=True)
    p.add_argument("--cells2", required=True)
    p.set_defaults(func=_cmd_product)

    p = sub.add_parser("witness", help="constructive witnesses")
    wsub = p.add_subparsers(dest="witness_kind", required=True)

    w = wsub.add_parser("nonperiodic",
                        help="a word defeating every small period")
    common(w)
    w.add_argument("--p-bound", required=True, metavar="M")
    w.add_argument("--origin", metavar="A",
                   help="origin letter (default: first letter)")
    w.add_argument("--shape-bound", metavar="S",
                   help="per-p witness search bound (default p bound + 2)")
    w.set_defaults(func=_cmd_witness_nonperiodic)

    w = wsub.add_parser("connect", help="a word with given ends and minimum shape")
    common(w)
    w.add_argument("--from", dest="origin", required=True, metavar="A")
    w.add_argument("--to", dest="terminus", required=True, metavar="B")
    w.add_argument("--min-shape", required=True, metavar="S")
    w.set_defaults(func=_cmd_witness_connect)

    w = wsub.add_parser("distinct-pair",
                        help="two words of equal shape and origin")
    common(w)
    w.add_argument("--max-grade", type=int, default=4,
                   help="largest total shape size searched "
                        "(default %(default)s)")
    w.set_defaults(func=_cmd_witness_distinct_pair)

    w = wsub.add_parser("set-s", help="a translate-separated word family")
    common(w)
    w.add_argument("--p-bound", required=True, metavar="M")
    w.add_argument("--shape-bound", metavar="S",
                   help="per-p witness search bound (default p bound + 2)")
    w.set_defaults(func=_cmd_witness_set_s)

    w = wsub.add_parser("q-support",
                        help="the projection support over a separating family")
    common(w)
    w.add_argument("--p-bound", required=True, metavar="M")
    w.add_argument("--shape-bound", metavar="S",
                   help="per-p witness search bound (default p bound + 2)")
    w.add_argument("--total", metavar="S",
                   help="ambient shape (default m + l); larger values "
                        "realise refinements")
    w.set_defaults(func=_cmd_witness_q_support)

    p = sub.add_parser("bratteli", help="the graded diagram of the filtration")
    common(p)
    p.add_argument("--upto", required=True, metavar="S")
    p.add_argument("--format", choices=["text", "dot", "json"], default="text")
    p.add_argument("--chain", action="store_true",
                   help="also print the diagonal chain")
    p.set_defaults(func=_cmd_bratteli)

    p = sub.add_parser("tensor", help="tensor rank-1 systems into one file")
    p.add_argument("factors", nargs="+", help="rank-1 system files, in order")
    p.add_argument("--transpose", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_tensor)

    p = sub.add_parser("redecorate",
                       help="replace decorations by decorated words of given shapes")
    common(p)
    p.add_argument("--map", required=True,
                   help='per-decoration shapes, e.g. "0=1;1=0" or "a=1,0;b=0,0"')
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_redecorate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SubshiftError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    try:
        code = main()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); exit quietly
        import os
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    console_main()
