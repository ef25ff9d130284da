import json

import pytest

from synergy.cli import main
from synergy.harness import CSV_HEADER


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_instance_and_trace(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "--family", "example4", "--n", "9", "--rho", "3")
    assert code == 0 and out.split() == ["7", "8", "9", "4", "5", "6", "1", "2", "3"]
    path = tmp_path / "t.trace"
    code, _, _ = run(capsys, "gen", "--family", "example2", "--n", "100", "--queries", "uniform:4",
                     "--order", "ping-pong", "--out", str(path))
    assert code == 0 and path.read_text() == "S 20\nS 80\nS 40\nS 60\n"


def test_sort_prints_report(capsys):
    code, out, _ = run(capsys, "sort", "--family", "example1", "--n", "64", "--algo", "dlm_sort")
    report = json.loads(out)
    assert code == 0 and report["verified"] and report["algorithm"] == "dlm_sort"
    assert report["descriptors"]["rho"] == 32 and report["comparisons"] > 0


def test_multiselect_ranks_from_flag_and_file(capsys, tmp_path):
    inst = tmp_path / "micro.txt"
    inst.write_text("2\n3\n1\n3\n7\n8\n9\n4\n5\n6\n")
    code, out, _ = run(capsys, "multiselect", "--input", str(inst), "--ranks", "4,1")
    assert code == 0 and json.loads(out)["answers"] == [3, 1]
    ranks = tmp_path / "ranks.txt"
    ranks.write_text("10\n5\n")
    code, out, _ = run(capsys, "multiselect", "--input", str(inst), "--ranks-file", str(ranks),
                       "--algo", "multiselect_with_global")
    assert code == 0 and json.loads(out)["answers"] == [9, 4]


@pytest.mark.parametrize("algo", ["ram", "finger"])
def test_defer_replays_trace(capsys, tmp_path, algo):
    inst = tmp_path / "micro.txt"
    inst.write_text("2\n3\n1\n3\n7\n8\n9\n4\n5\n6\n")
    trace = tmp_path / "q.trace"
    trace.write_text("S 4\nR 3\nR 0\n")
    code, out, _ = run(capsys, "defer", "--input", str(inst), "--trace", str(trace), "--algo", algo)
    result = json.loads(out)
    assert code == 0 and result["answers"] == [3, 2, 0] and result["verified"]


@pytest.mark.parametrize("algo", ["rank", "select"])
def test_succinct_build_serialize_load(capsys, tmp_path, algo):
    blob = tmp_path / "s.bin"
    code, out, _ = run(capsys, "succinct", "--family", "random", "--n", "500", "--rho", "8", "--sigma", "100",
                       "--algo", algo, "--serialize", str(blob), "--queries", "uniform:5")
    built = json.loads(out)
    assert code == 0 and built["round_trip_exact"] and built["verified"]
    code, out, _ = run(capsys, "succinct", "--load", str(blob), "--queries", "all", "--kind", "mixed")
    loaded = json.loads(out)
    assert code == 0 and loaded["verified"] and loaded["total_bits"] == built["total_bits"]


def test_bench_csv(capsys, tmp_path):
    out_path = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bench", "--family", "example1,example2", "--sizes", "16,32",
                     "--algo", "quick_synergy_sort,multiselect", "--queries", "uniform:3", "--out", str(out_path))
    lines = out_path.read_text().splitlines()
    assert code == 0 and lines[0] == ",".join(CSV_HEADER) and len(lines) == 1 + 2 * 2 * 2


def test_bench_empty_algorithm_list(capsys):
    code, out, _ = run(capsys, "bench", "--family", "example1", "--n", "16", "--algo", "")
    assert code == 0 and out == ",".join(CSV_HEADER) + "\n"


def test_errors_exit_nonzero(capsys):
    code, _, err = run(capsys, "gen", "--family", "example3", "--n", "10", "--rho", "3")
    assert code == 2 and "divisible" in err
    code, _, err = run(capsys, "sort", "--algo", "bogo", "--n", "8")
    assert code == 2 and "bogo" in err
    code, _, err = run(capsys, "defer", "--trace", "/nonexistent/trace")
    assert code == 2 and "/nonexistent/trace" in err
