import pytest

from removal_lab.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, dispatch, load_family, sidecar_path
from removal_lab.construct import Theorem5Family, theorem5_family
from removal_lab.formats import from_graph6, loads_report, read_graph, write_graph
from removal_lab.graph import complete_graph, cycle_graph, empty_graph, gnp_random_graph, is_isomorphic


def _run(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr().out
    return code, (loads_report(out) if out.strip() else (None, []))


@pytest.fixture
def triangle_family(tmp_path):
    path = tmp_path / "triangle.txt"
    path.write_text("# triangle-free\nK3\n")
    return path


# --- gen / verify ---

def test_gen_oddcycle_then_verify(tmp_path, capsys):
    out = tmp_path / "c5.g6"
    code, (header, _) = _run(capsys, "--seed", "3", "--out", str(out), "gen", "hard", "--kind", "oddcycle", "--n", "25")
    assert code == EXIT_OK
    assert header["kind"] == "hard" and header["seed"] == 3
    assert header["construction"] == "oddcycle" and header["epsilon"] == "1/50"
    assert read_graph(out).n == 25
    assert sidecar_path(out).exists()

    code, (header, lines) = _run(capsys, "verify", "--graph", str(out), "--cert", str(sidecar_path(out)))
    assert code == EXIT_OK
    assert [line["kind"] for line in lines] == ["odd-girth"]
    assert all(line["passed"] for line in lines)


@pytest.mark.slow
def test_gen_theorem4_then_verify(tmp_path, capsys):
    out = tmp_path / "thm4.g6"
    code, (header, _) = _run(
        capsys, "--out", str(out), "gen", "hard", "--kind", "thm4", "--n", "1800", "--eps", "1/2073600"
    )
    assert code == EXIT_OK
    assert header["construction"] == "thm4" and header["n"] == 1800
    assert header["checks"] == {"structure": True}

    code, (_, lines) = _run(capsys, "verify", "--graph", str(out), "--cert", str(sidecar_path(out)))
    assert code == EXIT_OK
    assert lines and all(line["passed"] for line in lines)


def test_verify_fails_on_another_graph(tmp_path, capsys):
    out = tmp_path / "c5.g6"
    assert dispatch(["--out", str(out), "gen", "hard", "--kind", "oddcycle", "--n", "25"]) == EXIT_OK
    capsys.readouterr()
    swapped = tmp_path / "swapped.g6"
    write_graph(cycle_graph(25), swapped)
    code, (_, lines) = _run(capsys, "verify", "--graph", str(swapped), "--cert", str(sidecar_path(out)))
    assert code == EXIT_FAILED
    assert lines[0]["kind"] == "fingerprint" and not lines[0]["passed"]


def test_gen_rs_writes_edge_records(tmp_path, capsys):
    out = tmp_path / "rs.json"
    code, (header, _) = _run(capsys, "--out", str(out), "gen", "rs", "--h", "3", "--delta", "1/100")
    assert code == EXIT_OK
    assert (header["m"], header["r"], header["cliques"]) == (5, 30, 10)
    assert out.read_text().startswith("{")
    assert read_graph(out).edge_count == 30


def test_gen_behrend_to_stdout(capsys):
    code, (header, [record]) = _run(capsys, "gen", "behrend", "--m", "5", "--k", "2")
    assert code == EXIT_OK
    assert header["density"] == "2/5"
    assert record["members"] == [1, 3]


@pytest.mark.parametrize("argv", [
    ["gen", "behrend", "--m", "5"],
    ["--out", "x.g6", "gen", "hard", "--kind", "thm4", "--n", "1800"],
    ["gen", "hard", "--kind", "oddcycle", "--n", "25"],
    ["gen", "spiral"],
    ["frobnicate"],
    ["--threads", "0", "classify", "--graph", "C5"],
    ["--log-level", "chatty", "classify", "--graph", "C5"],
])
def test_usage_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert dispatch(argv) == EXIT_USAGE


def test_bad_log_level_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("REMOVAL_LAB_LOG_LEVEL", "chatty")
    assert dispatch(["classify", "--graph", "C5"]) == EXIT_USAGE
    assert "unknown log level" in capsys.readouterr().err


def test_help_exits_cleanly(capsys):
    assert dispatch(["--help"]) == EXIT_OK
    assert "usage" in capsys.readouterr().out


def test_missing_graph_file(tmp_path, capsys):
    assert dispatch(["classify", "--graph", str(tmp_path / "nope.g6")]) == EXIT_USAGE
    assert "no such file" in capsys.readouterr().err


# --- Analysis commands ---

def test_classify_named_graph(capsys):
    code, (_, [record]) = _run(capsys, "classify", "--graph", "C5")
    assert code == EXIT_OK
    assert record["odd_girth"] == 5
    assert not record["bipartite"] and not record["split"]
    assert record["vc_dimension"] == 2


def test_count_and_its_budget(capsys):
    code, (_, [record]) = _run(capsys, "count", "--graph", "K4", "--pattern", "K3")
    assert code == EXIT_OK and record["copies"] == "4"
    assert dispatch(["--budget-pattern-vertices", "2", "count", "--graph", "K4", "--pattern", "K3"]) == EXIT_USAGE


def test_pack_reports_its_size(capsys):
    code, (header, copies) = _run(capsys, "pack", "--graph", "C6", "--pattern", "P3", "--mode", "subgraph")
    assert code == EXIT_OK
    assert header["size"] == len(copies) > 0


def test_core_of_even_cycle(capsys):
    code, (_, [record]) = _run(capsys, "core", "--graph", "C6")
    assert code == EXIT_OK
    assert is_isomorphic(from_graph6(record["core"]), complete_graph(2))


def test_kf_of_named_family(tmp_path, capsys):
    path = tmp_path / "odd.txt"
    path.write_text("K3\nC5\n")
    code, (_, [poset]) = _run(capsys, "kf", "--family", str(path))
    assert code == EXIT_OK
    assert len(poset["classes"]) == 2
    assert is_isomorphic(from_graph6(poset["classes"][poset["maximal"][0]]), cycle_graph(5))


def test_partition_of_complete_graph(tmp_path, capsys):
    path = write_graph(complete_graph(10), tmp_path / "k10.g6")
    code, (header, [partition, report]) = _run(capsys, "partition", "--graph", str(path), "--delta", "1/5")
    assert code == EXIT_OK
    assert header["found"] is True
    assert report["passed"] and len(partition["rows"]) == 1


def test_test_command_rejects_every_trial(triangle_family, capsys):
    code, (header, [report]) = _run(
        capsys, "--seed", "1", "test", "--graph", "K4", "--family", str(triangle_family), "--q", "3", "--trials", "10"
    )
    assert code == EXIT_OK
    assert header["family"] == "triangle"
    assert report["rejections"] == 10 and report["seed"] == 1


def test_curve_over_an_instance_directory(tmp_path, triangle_family, capsys):
    instances = tmp_path / "instances"
    instances.mkdir()
    write_graph(complete_graph(10), instances / "a_k10.g6")
    write_graph(empty_graph(10), instances / "b_empty.g6")
    code, (_, records) = _run(
        capsys, "curve", "--instances", str(instances), "--family", str(triangle_family),
        "--q-grid", "2,3,4", "--trials", "20",
    )
    assert code == EXIT_OK
    summary = [r for r in records if r["table"] == "summary"]
    assert [(r["instance"], r["q_star"], r["censored"]) for r in summary] == [
        ("a_k10.g6", 3, False),
        ("b_empty.g6", None, True),
    ]
    assert len([r for r in records if r["table"] == "frequency"]) == 5


def test_curve_rejects_bad_grid(tmp_path, triangle_family):
    write_graph(complete_graph(4), tmp_path / "k4.g6")
    argv = ["curve", "--instances", str(tmp_path), "--family", str(triangle_family), "--q-grid", "2,x"]
    assert dispatch(argv) == EXIT_USAGE


# --- Family files ---

def test_load_family_formats(tmp_path):
    lines = tmp_path / "mixed.g6"
    lines.write_text("C5\nBw\n")
    family = load_family(lines)
    assert family.name == "mixed"
    assert [g.n for g in family.members] == [5, 3]

    symbolic = tmp_path / "thm5.json"
    symbolic.write_text(theorem5_family(1).model_dump_json())
    assert isinstance(load_family(symbolic), Theorem5Family)


def test_classify_family_conditions(tmp_path, capsys):
    path = tmp_path / "p3.txt"
    path.write_text("P3\n")
    code, (header, [conditions]) = _run(capsys, "classify", "--family", str(path))
    assert code == EXIT_OK
    assert header["family"] == str(path)
    assert conditions["thm1_sufficient"] and conditions["thm2_necessary"]
    assert dispatch(["classify"]) == EXIT_USAGE


def test_obstruct_search_and_blowup_witness(tmp_path, capsys):
    p3 = tmp_path / "p3.txt"
    p3.write_text("P3\n")
    code, (header, [pattern]) = _run(capsys, "--seed", "0", "obstruct", "--family", str(p3), "--side", "2", "--attempts", "200")
    assert code == EXIT_OK and header["found"]
    assert len(pattern["cross_edges"]) == 3

    k3 = tmp_path / "k3.txt"
    k3.write_text("K3\n")
    code, (header, [witness]) = _run(capsys, "obstruct", "--family", str(k3), "--candidate", "K2", "--s-max", "3")
    assert code == EXIT_OK
    assert witness["g"] == [0, 0] and witness["kind"] == "bounded witness"


# --- Determinism across thread counts ---

def test_test_report_is_identical_across_thread_counts(tmp_path, triangle_family):
    graph = write_graph(gnp_random_graph(40, 0.15, seed=6), tmp_path / "g40.g6")
    outputs = []
    for threads in ("1", "8"):
        out = tmp_path / f"test-{threads}.jsonl"
        argv = ["--seed", "5", "--threads", threads, "--out", str(out),
                "test", "--graph", str(graph), "--family", str(triangle_family), "--q", "12", "--trials", "200"]
        assert dispatch(argv) == EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_curve_report_is_identical_across_thread_counts(tmp_path, triangle_family):
    instances = tmp_path / "instances"
    instances.mkdir()
    for seed in range(3):
        write_graph(gnp_random_graph(30, 0.1 * (seed + 1), seed=seed), instances / f"g{seed}.g6")
    outputs = []
    for threads in ("1", "8"):
        out = tmp_path / f"curve-{threads}.jsonl"
        argv = ["--seed", "11", "--threads", threads, "--out", str(out),
                "curve", "--instances", str(instances), "--family", str(triangle_family),
                "--q-grid", "3,6,12,24", "--trials", "100"]
        assert dispatch(argv) == EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
