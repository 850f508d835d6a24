import asyncio
import json

import pytest

from datatypes import ConfigError, RunConfig
from main import main


def run(capsys, *argv):
    code = asyncio.run(main(list(argv)))
    return code, capsys.readouterr()


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("PERIODZETA_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.setenv("PERIODZETA_WORKERS", "0")


def test_cosets(capsys):
    code, captured = run(capsys, "cosets", "--N", "3")
    assert code == 0
    report = json.loads(captured.out)
    assert report["schema_version"] == 1
    assert len(report["cosets"]) == 8
    assert {"N": 3, "c": 0, "d": 1} in report["cosets"]


def test_cosets_table(capsys):
    code, captured = run(capsys, "cosets", "--N", "2", "--format", "table")
    assert code == 0
    assert captured.out.split()[:2] == ["c", "d"]


def test_period_basis(capsys):
    code, captured = run(capsys, "period-basis", "--N", "1", "--w", "10", "--sign", "+")
    assert code == 0
    report = json.loads(captured.out)
    assert report["dim"] == 2
    assert len(report["basis"]) == 2
    assert len(report["basis"][0]["0,0"]) == 11


def test_inconsistent_weights_exit_with_usage_error(capsys):
    code, captured = run(capsys, "period-basis", "--N", "1", "--k", "12", "--w", "9")
    assert code == 2
    assert "Inconsistent weights" in captured.err


def test_dims(capsys):
    code, captured = run(capsys, "dims", "--N", "1", "--w", "10")
    assert code == 0
    report = json.loads(captured.out)
    assert report["eichler_shimura"]["cusp_dim"] == 1
    assert report["relaxed_equals_W"]
    assert report["delta_star_kernel_equals_W"]
    assert report["iota_injective"]


def test_relations_json_file(capsys, tmp_path):
    out = tmp_path / "relations.json"
    code, _ = run(capsys, "relations", "--N", "1", "--k", "12", "--json", str(out), "--check-converse")
    assert code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["dim_W_plus"] == 2
    assert report["q_symmetry"]
    assert report["converse_check"]
    relation = report["relations"][0]
    assert relation["certificate"]
    assert all(term["kind"] == "Z2" for term in relation["odd_part"]["terms"])
    for term in relation["odd_part"]["terms"]:
        assert set(term) == {"kind", "r", "s", "a", "b", "coeff"}
    assert {tuple(sorted(term)) for term in relation["single_part"]["terms"]} <= {("c", "coeff", "k", "kind")}
    assert "/" in relation["scale"]


def test_relations_latex(capsys):
    code, captured = run(capsys, "relations", "--N", "1", "--k", "12", "--latex")
    assert code == 0
    assert "\\mathcal{P}^{\\mathrm{ev}}_{12,1}" in captured.out
    assert "Z_{0,0}^{" in captured.out


def test_excluded_weight_level(capsys):
    code, _ = run(capsys, "relations", "--N", "1", "--k", "2")
    assert code == 2


def test_latex_only_for_relations(capsys):
    code, _ = run(capsys, "verify", "--N", "1", "--k", "12", "--format", "latex")
    assert code == 2


def test_dsh_check(capsys):
    code, captured = run(capsys, "dsh-check", "--N", "5", "--r", "2", "--s", "3", "--a", "1", "--b", "2", "--prec-bits", "96")
    assert code == 0
    record = json.loads(captured.out)
    assert record["passed"]
    assert (record["a"], record["b"]) == (1, 2)


def test_dsh_check_at_excluded_weight(capsys):
    code, _ = run(capsys, "dsh-check", "--N", "1", "--r", "1", "--s", "1")
    assert code == 2


def test_euler_check(capsys):
    code, captured = run(capsys, "euler-check", "--N", "4", "--k", "3", "--a", "1", "--prec-bits", "96")
    assert code == 0
    record = json.loads(captured.out)
    assert record["factor"] == "-1/128"
    assert record["passed"]


def test_euler_check_divergent(capsys):
    code, _ = run(capsys, "euler-check", "--N", "1", "--k", "1", "--a", "0")
    assert code == 2


def test_missing_command():
    with pytest.raises(SystemExit):
        asyncio.run(main([]))


@pytest.mark.slow
def test_verify_level_one_weight_twelve(capsys, tmp_path):
    out = tmp_path / "verify.json"
    code, _ = run(capsys, "verify", "--N", "1", "--k", "12", "--json", str(out))
    assert code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["passed"]
    assert len(report["relations"]) == 2
    for relation in report["relations"]:
        assert relation["rational"] == relation["predicted"]


def test_run_config_fills_weights():
    cfg = RunConfig(command="dims", N=3, k=6)
    assert cfg.w == 4
    assert RunConfig(command="dims", N=3, w=4).k == 6


@pytest.mark.parametrize(
    "kwargs",
    [
        {"command": "explode", "N": 1},
        {"command": "dims", "N": 0, "k": 4},
        {"command": "dims", "N": 3},
        {"command": "verify", "N": 1, "k": 2},
        {"command": "dsh-check", "N": 3, "r": 0, "s": 2},
        {"command": "dims", "N": 3, "k": 4, "flavor": "twisted"},
        {"command": "verify", "N": 3, "k": 4, "prec_bits": 8},
        {"command": "verify", "N": 3, "k": 4, "max_den": 0},
        {"command": "cosets", "N": 3, "workers": -1},
        {"command": "dims", "N": 3, "k": 4, "output_format": "latex"},
    ],
)
def test_run_config_rejects(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(**kwargs)
