import json

import pytest

from rankshift import DecorationMap, load_system, save_system
from rankshift.cli import SystemFileError, main, parse_system, system_to_json


@pytest.fixture()
def gm_file(tmp_path, gm):
    path = tmp_path / "gm.json"
    save_system(gm, path)
    return str(path)


@pytest.fixture()
def gm2_file(tmp_path, gm2):
    path = tmp_path / "gm2.json"
    save_system(gm2, path)
    return str(path)


@pytest.fixture()
def fs2_file(tmp_path, fs2):
    path = tmp_path / "fs2.json"
    save_system(fs2, path)
    return str(path)


@pytest.fixture()
def jj_file(tmp_path, jj):
    path = tmp_path / "jj.json"
    save_system(jj, path)
    return str(path)


def test_save_load_roundtrip(tmp_path, corpus):
    for name, ts in corpus:
        path = tmp_path / f"{name}.json"
        save_system(ts, path)
        loaded, dmap = load_system(path)
        assert loaded == ts
        assert dmap == DecorationMap.identity(ts.alphabet)


def test_load_with_decorations_roundtrip(tmp_path, gm):
    dmap = DecorationMap(("p", "q", "r"), (0, 1, 0))
    path = tmp_path / "dec.json"
    save_system(gm, path, dmap)
    loaded, loaded_map = load_system(path)
    assert loaded == gm
    assert loaded_map == dmap


def test_load_rejects_bad_entry():
    data = {"rank": 1, "alphabet": ["0", "1"],
            "matrices": [[[1, 2], [0, 0]]]}
    with pytest.raises(SystemFileError) as err:
        parse_system(data)
    assert "matrices[0][0][1]" in str(err.value)
    assert "2" in str(err.value)


def test_load_rejects_unknown_decoration_letter():
    data = {"rank": 1, "alphabet": ["0", "1"],
            "matrices": [[[1, 1], [1, 0]]],
            "decorations": {"names": ["d"], "delta": ["x"]}}
    with pytest.raises(SystemFileError) as err:
        parse_system(data)
    assert "delta[0]" in str(err.value)


def test_load_rejects_wrong_matrix_count():
    data = {"rank": 2, "alphabet": ["0"], "matrices": [[[1]]]}
    with pytest.raises(SystemFileError):
        parse_system(data)


def test_load_reports_json_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ not json")
    with pytest.raises(SystemFileError) as err:
        load_system(path)
    assert "line 1" in str(err.value)


def test_transpose_loader(tmp_path, gm):
    data = system_to_json(gm)
    data["matrices"] = [[[row[b] for row in data["matrices"][0]]
                         for b in range(2)]]
    path = tmp_path / "t.json"
    path.write_text(json.dumps(data))
    loaded, _ = load_system(path, transpose=True)
    assert loaded == gm


def test_missing_file_exits_2(capsys):
    assert main(["verify", "/nonexistent/x.json"]) == 2
    assert "error" in capsys.readouterr().err


def test_verify_pass_exit_0(fs2_file, capsys):
    code = main(["verify", fs2_file, "--h3-p-bound", "2,2",
                 "--h3-shape-bound", "3,3"])
    out = capsys.readouterr().out
    assert code == 0
    assert "H0: pass" in out
    assert "H3 (bounded): bounded-pass" in out
    assert "result: ok" in out


def test_verify_fail_exit_1(jj_file, capsys):
    code = main(["verify", jj_file])
    out = capsys.readouterr().out
    assert code == 1
    assert "H1a-c: fail" in out
    assert "H3* (j=1): skipped" in out


def test_verify_json_output(gm2_file, capsys):
    code = main(["verify", gm2_file, "--json"])
    data = json.loads(capsys.readouterr().out)
    assert code == 1  # H3* fails for the squared golden mean
    conditions = {c["condition"]: c["status"] for c in data["checks"]}
    assert conditions["H3 (bounded)"] == "bounded-pass"
    assert conditions["H3* (j=2)"] == "fail"


def test_count_per_letter_format(gm2_file, capsys):
    assert main(["count", gm2_file, "--shape", "1,1", "--per-letter"]) == 0
    assert capsys.readouterr().out == "00:4 01:2 10:2 11:1 total:9\n"


def test_count_total_only(fs2_file, capsys):
    assert main(["count", fs2_file, "--shape", "1,1"]) == 0
    assert capsys.readouterr().out == "total:16\n"


def test_count_bad_shape_exits_2(gm2_file, capsys):
    assert main(["count", gm2_file, "--shape", "1"]) == 2
    assert main(["count", gm2_file, "--shape", "x,y"]) == 2


def test_enumerate(gm_file, capsys):
    assert main(["enumerate", gm_file, "--shape", "2", "--origin", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["shape=2 cells=1,0,0", "shape=2 cells=1,0,1", "count:2"]


def test_enumerate_limit(fs2_file, capsys):
    assert main(["enumerate", fs2_file, "--shape", "1,1", "--limit", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 5
    assert out[-1] == "count:3"


def test_extend(gm_file, capsys):
    assert main(["extend", gm_file, "--shape", "1", "--cells", "0,1",
                 "--direction", "1", "--letter", "0"]) == 0
    assert capsys.readouterr().out == "shape=2 cells=0,1,0\n"


def test_extend_invalid_transition_exit_1(gm_file, capsys):
    code = main(["extend", gm_file, "--shape", "0", "--cells", "1",
                 "--direction", "1", "--letter", "1"])
    assert code == 1
    assert "failed" in capsys.readouterr().err


def test_product(gm_file, capsys):
    assert main(["product", gm_file, "--shape1", "1", "--cells1", "1,0",
                 "--shape2", "1", "--cells2", "0,1"]) == 0
    assert capsys.readouterr().out == "shape=2 cells=1,0,1\n"


def test_witness_connect(gm_file, capsys):
    assert main(["witness", "connect", gm_file, "--from", "1", "--to", "1",
                 "--min-shape", "2"]) == 0
    assert capsys.readouterr().out == "shape=2 cells=1,0,1\n"


def test_witness_distinct_pair(fs2_file, capsys):
    assert main(["witness", "distinct-pair", fs2_file]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2 and lines[0] != lines[1]


def test_witness_nonperiodic(fs2_file, capsys):
    assert main(["witness", "nonperiodic", fs2_file, "--p-bound", "1,1",
                 "--origin", "00"]) == 0
    assert capsys.readouterr().out.startswith("shape=")


def test_witness_gate_blocks_bad_system(jj_file, capsys):
    code = main(["witness", "distinct-pair", jj_file])
    assert code == 1
    assert "H1a-c" in capsys.readouterr().err


def test_witness_nonperiodic_exhaustion_exits_1(tmp_path, capsys):
    """A system passing (H0)-(H2) can still lack witnesses: exit 1."""
    from rankshift import Alphabet, TileSystem
    p1 = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    p2 = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    path = tmp_path / "perm.json"
    save_system(TileSystem(Alphabet("012"), [p1, p2]), path)
    code = main(["witness", "nonperiodic", str(path), "--p-bound", "1,1"])
    assert code == 1
    assert "no non-periodic witness" in capsys.readouterr().err


def test_enumerate_decorated(tmp_path, gm, capsys):
    dmap = DecorationMap(("p", "q", "r"), (0, 1, 0))
    path = tmp_path / "dec.json"
    save_system(gm, path, dmap)
    assert main(["enumerate", str(path), "--shape", "1", "--decorated",
                 "--origin", "0"]) == 0
    out = capsys.readouterr().out.splitlines()
    # two shape-1 words from letter 0, two decorations mapping to it
    assert out[-1] == "count:4"
    assert out[0] == "decoration=p shape=1 cells=0,0"


def test_witness_set_s_and_q_support(fs2_file, capsys):
    assert main(["witness", "set-s", fs2_file, "--p-bound", "1,1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("common-shape:")
    assert main(["witness", "q-support", fs2_file, "--p-bound", "1,1"]) == 0
    out = capsys.readouterr().out
    assert "support-size:16" in out


def test_bratteli_text_and_dot(gm_file, capsys):
    assert main(["bratteli", gm_file, "--upto", "2"]) == 0
    out = capsys.readouterr().out
    assert "level 0: dims (1,1) total 2" in out
    assert "level 1: dims (2,1) total 3" in out
    assert "level 2: dims (3,2) total 5" in out
    assert main(["bratteli", gm_file, "--upto", "2", "--format", "dot"]) == 0
    dot = capsys.readouterr().out
    assert "digraph" in dot and '"1|0"' in dot


def test_bratteli_chain(fs2_file, capsys):
    assert main(["bratteli", fs2_file, "--upto", "2,2", "--chain"]) == 0
    out = capsys.readouterr().out
    assert "chain 0,0: (1,1,1,1)" in out
    assert "chain 2,2: (16,16,16,16)" in out


def test_tensor_subcommand(tmp_path, gm_file, gm2, capsys):
    out_path = str(tmp_path / "out.json")
    assert main(["tensor", gm_file, gm_file, "-o", out_path]) == 0
    built, _ = load_system(out_path)
    assert built == gm2


def test_redecorate_subcommand(tmp_path, gm_file, capsys):
    out_path = str(tmp_path / "re.json")
    assert main(["redecorate", gm_file, "--map", "0=1;1=0",
                 "-o", out_path]) == 0
    out = capsys.readouterr().out
    assert "0:00 -> 0" in out
    assert "1:1 -> 1" in out
    _, dmap = load_system(out_path)
    assert dmap.names == ("0:00", "0:01", "1:1")


def test_redecorate_requires_full_map(gm_file, capsys):
    assert main(["redecorate", gm_file, "--map", "0=1"]) == 2


def test_output_is_deterministic(gm2_file, capsys):
    main(["verify", gm2_file, "--json"])
    first = capsys.readouterr().out
    main(["verify", gm2_file, "--json"])
    second = capsys.readouterr().out
    assert first == second
