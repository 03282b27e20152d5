import csv
import io
import json
import subprocess
import sys

import pytest

from cclp.cli import EXIT_DATA, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from cclp.datasets import Registry, sha256_of


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# 30-node ring with second neighbours linked
RING = "".join(f"{i} {(i + 1) % 30}\n{i} {(i + 2) % 30}\n" for i in range(30))


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def data_dir(tmp_path, monkeypatch):
    (tmp_path / "diamond.txt").write_text("a b\na c\nb c\nb d\nc d\n")
    (tmp_path / "k4minus.txt").write_text("a c\na d\nb c\nb d\nc d\n")
    (tmp_path / "bad.txt").write_text("a b\nlonely\n")
    digest = sha256_of(tmp_path / "diamond.txt")
    (tmp_path / "registry.yaml").write_text(
        "datasets:\n"
        f"  diamond: {{path: diamond.txt, n: 4, m: 5, sha256: {digest}}}\n"
        "  k4minus: {path: k4minus.txt}\n"
        "  tampered: {path: diamond.txt, sha256: deadbeef}\n"
        "  wrongsize: {path: diamond.txt, n: 5}\n"
        "  missing: {path: nowhere.txt}\n"
        "  bad: {path: bad.txt}\n")
    monkeypatch.setenv("CCLP_DATA_DIR", str(tmp_path))
    return tmp_path


def test_stats_bundled_fixture(capsys):
    code, out, _ = run(capsys, "stats", "--dataset", "fixture")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert list(row) == ["dataset", "N", "M", "k_avg", "d_avg", "CC", "LCP_corr", "components"]
    assert (row["dataset"], row["N"], row["M"]) == ("fixture", "6", "8")


def test_stats_json(capsys, data_dir):
    code, out, _ = run(capsys, "stats", "--dataset", "diamond", "--out", "json")
    assert code == EXIT_OK
    (row,) = json.loads(out)
    assert row["N"] == 4 and row["M"] == 5


def test_missing_file_names_dataset(capsys, data_dir):
    code, _, err = run(capsys, "stats", "--dataset", "missing")
    assert code == EXIT_IO
    assert "missing" in err


def test_checksum_mismatch_refuses(capsys, data_dir):
    code, out, err = run(capsys, "stats", "--dataset", "tampered")
    assert code == EXIT_IO and "checksum" in err and out == ""


def test_expected_counts_verified(capsys, data_dir):
    code, _, err = run(capsys, "stats", "--dataset", "wrongsize")
    assert code == EXIT_IO and "expected N=5" in err


def test_parse_error_exit_code(capsys, data_dir):
    code, _, err = run(capsys, "stats", "--dataset", "bad")
    assert code == EXIT_DATA and "line 2" in err


def test_unknown_index_lists_valid_tags(capsys):
    code, _, err = run(capsys, "evaluate", "--dataset", "fixture", "--indices", "katz")
    assert code == EXIT_USAGE
    assert "pa,cn,jc,aa,ra,car,cclp,random" in err


def strip_wall(text):
    return [{k: v for k, v in r.items() if k != "wall_ms"} for r in rows(text)]


def test_evaluate_rows_and_determinism(capsys, data_dir):
    (data_dir / "ring.txt").write_text(RING)
    args = ["evaluate", "--dataset", "ring.txt", "--indices", "cn,cclp", "--runs", "2",
            "--lmax", "10", "--auc-n", "500", "--seed", "11", "--metrics", "precision,auc"]
    code, out1, err = run(capsys, *args)
    assert code == EXIT_OK, err
    got = rows(out1)
    assert [r["index"] for r in got] == ["cn", "cn", "cclp", "cclp"]
    assert list(got[0]) == ["dataset", "index", "metric", "mean", "stddev", "runs", "seed",
                            "param_L", "param_n", "wall_ms"]
    assert all(r["seed"] == "11" and r["runs"] == "2" and r["param_L"] == "10" for r in got)
    code, out2, _ = run(capsys, *args)
    assert strip_wall(out1) == strip_wall(out2)


def test_evaluate_ratio_column_and_curve(capsys, data_dir):
    (data_dir / "ring.txt").write_text(RING)
    code, out, err = run(capsys, "evaluate", "--dataset", "ring.txt", "--indices", "car,cclp",
                         "--runs", "3", "--lmax", "10", "--auc-n", "500", "--curve")
    assert code == EXIT_OK, err
    got = rows(out)
    assert "cclp_vs_car" in got[0]
    metrics = [r["metric"] for r in got if r["index"] == "cclp"]
    assert metrics == ["precision", "aup", "auc"] + [f"precision@{l}" for l in range(1, 11)]


def test_evaluate_auc_exact(capsys):
    code, out, err = run(capsys, "evaluate", "--dataset", "fixture", "--indices", "cclp,random",
                         "--runs", "3", "--metrics", "auc", "--auc-exact")
    assert code == EXIT_OK, err
    assert {r["param_n"] for r in rows(out)} == {"exact"}


def test_predict_k4_minus_edge(capsys, data_dir):
    code, out, _ = run(capsys, "predict", "--dataset", "k4minus", "--index", "cn", "--top-k", "1")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert {row["label_x"], row["label_y"]} == {"a", "b"} and float(row["score"]) == 2.0


def test_predict_diamond_cclp(capsys, data_dir):
    code, out, _ = run(capsys, "predict", "--dataset", "diamond", "--index", "cclp", "--top-k", "1")
    (row,) = rows(out)
    assert {row["label_x"], row["label_y"]} == {"a", "d"}
    assert float(row["score"]) == pytest.approx(4 / 3, rel=1e-9)


def test_predict_top_k_zero_and_truncation(capsys, caplog, data_dir):
    code, out, _ = run(capsys, "predict", "--dataset", "diamond", "--top-k", "0")
    assert code == EXIT_OK and rows(out) == [] and "top-k is 0" in caplog.text
    code, out, _ = run(capsys, "predict", "--dataset", "diamond", "--top-k", "50")
    assert code == EXIT_OK and len(rows(out)) == 1 and "truncating" in caplog.text


def test_bench_empty_index_list_is_noop(capsys):
    code, out, _ = run(capsys, "bench", "--indices", "")
    assert code == EXIT_OK and rows(out) == []


def test_bench_synthetic(capsys):
    code, out, _ = run(capsys, "bench", "--synthetic", "200", "--indices", "cn,cclp", "--repeats", "3")
    assert code == EXIT_OK
    got = rows(out)
    assert [r["index"] for r in got] == ["cn", "cclp"]
    assert all(float(r["median_ms"]) > 0 and r["repeats"] == "3" for r in got)


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "stats", "--dataset", "fixture", "--output", str(target))
    assert code == EXIT_OK and out == ""
    assert rows(target.read_text())[0]["N"] == "6"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cclp", "stats", "--dataset", "fixture"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("dataset,N,M")


def test_registry_override_order(tmp_path, data_dir):
    other = tmp_path / "other.yaml"
    other.write_text("datasets:\n  diamond: {path: k4minus.txt}\n")
    reg = Registry.default([other])
    assert reg.resolve("diamond").path.name == "k4minus.txt"
    assert "fixture" in reg
