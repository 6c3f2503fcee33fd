import json

import numpy as np
import pytest

from vclab import cli


def _point_file(tmp_path, points, name="pts.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"dim": len(points[0]), "points": points}))
    return str(path)


def test_vcdim_prints_formula(capsys):
    assert cli.main(["vcdim", "--dim", "4"]) == 0
    out = capsys.readouterr().out
    assert "14" in out


def test_vcdim_certify_exit_zero(capsys):
    assert cli.main(["vcdim", "--dim", "1", "--certify"]) == 0
    out = capsys.readouterr().out
    assert "4/4 subsets certified" in out


def test_vcdim_rejects_bad_dim(capsys):
    assert cli.main(["vcdim", "--dim", "0"]) == 1


def test_missing_subcommand_is_usage_error():
    assert cli.main([]) == 1


def test_unknown_flag_is_usage_error():
    assert cli.main(["vcdim", "--dim", "2", "--bogus"]) == 1


def test_witness_deterministic_bytes(tmp_path, capsys):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert cli.main(["witness", "--dim", "1", "--seed", "7", "--out", a]) == 0
    assert cli.main(["witness", "--dim", "1", "--seed", "7", "--out", b]) == 0
    assert open(a, "rb").read() == open(b, "rb").read()


def test_witness_seed_changes_nothing_for_fixed_d1(tmp_path):
    # d=1 sphere points are pinned; only the recorded seed field differs
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    cli.main(["witness", "--dim", "1", "--seed", "1", "--out", a])
    cli.main(["witness", "--dim", "1", "--seed", "2", "--out", b])
    da, db = json.load(open(a)), json.load(open(b))
    assert da["seed"] == 1 and db["seed"] == 2
    assert da["payload"] == db["payload"]


def test_oracle_realizable_exit_zero(tmp_path, capsys):
    pts = _point_file(tmp_path, [[0.0], [1.0], [2.0]])
    assert cli.main(["oracle", "--points", pts, "--labels", "010"]) == 0
    assert "realizable" in capsys.readouterr().out


def test_oracle_infeasible_exit_two(tmp_path, capsys):
    pts = _point_file(tmp_path, [[0.0], [1.0], [2.0]])
    assert cli.main(["oracle", "--points", pts, "--labels", "101"]) == 2
    assert "infeasible" in capsys.readouterr().out


def test_oracle_labels_length_mismatch(tmp_path):
    pts = _point_file(tmp_path, [[0.0], [1.0], [2.0]])
    assert cli.main(["oracle", "--points", pts, "--labels", "01"]) == 1
    assert cli.main(["oracle", "--points", pts, "--labels", "01x"]) == 1


def test_oracle_writes_verifiable_certificate(tmp_path):
    pts = _point_file(tmp_path, [[0.0], [1.0], [2.0]])
    out = str(tmp_path / "oracle.json")
    assert cli.main(["oracle", "--points", pts, "--labels", "010",
                     "--out", out]) == 0
    assert cli.main(["verify", out]) == 0


def test_oracle_missing_file(tmp_path):
    assert cli.main(["oracle", "--points", str(tmp_path / "nope.json"),
                     "--labels", "01"]) == 1


def test_refute_random_exit_two(tmp_path, capsys):
    out = str(tmp_path / "ref.json")
    code = cli.main(["refute", "--dim", "1", "--seed", "3", "--out", out])
    assert code == 2
    assert "unrealizable" in capsys.readouterr().out
    assert cli.main(["verify", out]) == 0


def test_refute_rejects_wrong_cardinality(tmp_path, capsys):
    pts = _point_file(tmp_path, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert cli.main(["refute", "--points", pts]) == 1
    assert "needs exactly 6" in capsys.readouterr().err


def test_refute_deterministic(tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    cli.main(["refute", "--dim", "2", "--seed", "11", "--out", a])
    cli.main(["refute", "--dim", "2", "--seed", "11", "--out", b])
    assert open(a, "rb").read() == open(b, "rb").read()


def test_gmm_shatter_exit_zero(tmp_path, capsys):
    out = str(tmp_path / "mix.json")
    assert cli.main(["gmm-shatter", "--dim", "1", "--components", "2",
                     "--out", out]) == 0
    text = capsys.readouterr().out
    assert "|U| = 4" in text and "16 subsets" in text
    assert cli.main(["verify", out]) == 0


def test_gmm_shatter_guards(capsys):
    assert cli.main(["gmm-shatter", "--dim", "3", "--components", "2"]) == 1
    assert cli.main(["gmm-shatter", "--dim", "1", "--components", "9"]) == 1


def test_gmm_shatter_deterministic(tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    cli.main(["gmm-shatter", "--dim", "1", "--components", "2", "--out", a])
    cli.main(["gmm-shatter", "--dim", "1", "--components", "2", "--out", b])
    assert open(a, "rb").read() == open(b, "rb").read()


def test_shatter_fn_exact_counts(tmp_path, capsys):
    pts = _point_file(tmp_path, [[0.0], [1.0], [2.0]])
    assert cli.main(["shatter-fn", "--points", pts]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert rows[0] == "subset-size,realizable-count,total-count"
    assert rows[1:] == ["0,1,1", "1,3,3", "2,2,3", "3,1,1"]


def test_shatter_fn_csv_out(tmp_path):
    pts = _point_file(tmp_path, [[0.0], [1.0], [2.0], [3.0]])
    out = str(tmp_path / "table.csv")
    assert cli.main(["shatter-fn", "--points", pts, "--out", out]) == 0
    rows = open(out).read().strip().splitlines()
    # interval concept class on 4 collinear points: C(n,k) realizable until
    # gaps appear; sizes 2 and 3 lose the split subsets
    assert rows[0] == "subset-size,realizable-count,total-count"
    assert rows[1] == "0,1,1"
    assert rows[-1] == "4,1,1"
    total = sum(int(r.split(",")[1]) for r in rows[1:])
    assert total == 1 + 4 + 3 + 2 + 1      # contiguous runs of each size


def test_shatter_fn_empty_points_rejected(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({"dim": 1, "points": []}))
    assert cli.main(["shatter-fn", "--points", str(path)]) == 1


def test_verify_detects_tampering(tmp_path, capsys):
    out = str(tmp_path / "w.json")
    cli.main(["witness", "--dim", "1", "--out", out])
    doc = json.load(open(out))
    doc["payload"]["entries"][2]["slack"] *= 16.0
    open(out, "w").write(json.dumps(doc))
    assert cli.main(["verify", out]) == 3
    assert "verification failed" in capsys.readouterr().out


def test_verify_rejects_malformed(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{}")
    assert cli.main(["verify", str(path)]) == 1


def test_tolerance_flag_must_be_positive(tmp_path):
    pts = _point_file(tmp_path, [[0.0], [1.0]])
    assert cli.main(["oracle", "--points", pts, "--labels", "01",
                     "--tolerance", "-1"]) == 1


def test_tolerance_flag_widens_band(tmp_path, capsys):
    # inflated feasibility threshold turns a genuine optimum into an
    # indeterminate report, surfaced with exit 3
    pts = _point_file(tmp_path, [[0.0], [1.0], [2.0]])
    code = cli.main(["oracle", "--points", pts, "--labels", "010",
                     "--tolerance", "10.0"])
    assert code == 3
    assert "indeterminate" in capsys.readouterr().out
