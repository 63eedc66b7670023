import io
import json
import subprocess
import sys

import pytest

from sendovlab.cli import main, run
from sendovlab.cpoly import ZeroConfig
from sendovlab.records import parse_zeros


def call(*argv):
    out = io.StringIO()
    code, report = run(list(argv), stdout=out)
    text = out.getvalue()
    return code, (json.loads(text) if text.strip().startswith("{") else None), text


def test_crit_roots_of_unity():
    code, rep, _ = call("crit", "--zeros", "roots_of_unity:5")
    assert code == 0
    (loc, nu), = rep["body"]["second_kind"]
    assert nu == 4 and abs(complex(*loc)) <= 1e-10
    assert rep["header"]["command"] == "crit" and rep["header"]["tolerances"]["tau_sep"] == 1e-7


def test_classify():
    code, rep, _ = call("classify", "--zeros", "n=3 m=2; 0 0 2; 1 0 1")
    assert code == 0 and rep["body"]["stratum"] == "3:2,1/1"
    assert parse_zeros(rep["body"]["zeros"]) == ZeroConfig((0, 1), (2, 1))


def test_rank_sweep_no_deficiencies():
    code, rep, _ = call("rank-sweep", "--stratum", "5:1,1,1,1,1/1,1,1,1", "--samples", "1000", "--seed", "1")
    assert code == 0
    assert rep["body"]["deficient"] == 0 and rep["findings"] == []
    assert rep["body"]["min_margin"] > 1e-8


def test_sample_n8():
    code, rep, _ = call("sample", "--n", "8", "--samples", "100000", "--seed", "7")
    assert code == 0 and rep["body"]["max_S"] <= 1 + 1e-9
    assert parse_zeros(rep["body"]["argmax"]).n == 8


def test_sample_finding_exit_code(tmp_path):
    log = tmp_path / "findings.jsonl"
    code, rep, _ = call("sample", "--n", "3", "--samples", "2000", "--eps-report", "0.5", "--findings", str(log))
    assert code == 3 and rep["findings"]
    lines = log.read_text().splitlines()
    assert len(lines) == len(rep["findings"])
    # append-only: a second run adds to the log
    call("sample", "--n", "3", "--samples", "2000", "--eps-report", "0.5", "--findings", str(log))
    assert len(log.read_text().splitlines()) == 2 * len(lines)
    assert parse_zeros(json.loads(lines[0])["zeros"]).n == 3


def test_track_completed_and_boundary(tmp_path):
    export = tmp_path / "track.txt"
    code, rep, _ = call("track", "--zeros", "roots_of_unity:3", "--waypoint=-0.45+0.78j, -0.5-0.866j",
                        "--export", str(export))
    assert code == 0 and rep["body"]["status"] == "completed"
    rows = export.read_text().splitlines()
    assert len(rows) == len(rep["body"]["trajectory"])
    assert len(rows[0].split()) == 2 + 2 * (3 + 1)
    code, rep, _ = call("track", "--zeros", "0.9 0 1; -0.5 0.4 1; -0.5 -0.4 1", "--waypoint=0.9, -0.5-0.4j, -0.5-0.4j")
    assert code == 3 and rep["body"]["status"] == "boundary"
    assert rep["findings"][0]["kind"] == "boundary"


def test_scan(tmp_path):
    export = tmp_path / "scan.txt"
    code, rep, _ = call("scan", "--zeros", "roots_of_unity:5", "--resolution", "5", "--export", str(export))
    assert code == 0 and rep["body"]["max_residual"] <= 1e-5
    assert len(export.read_text().splitlines()) == 25


def test_search_and_kkt():
    code, rep, _ = call("search", "--zeros", "roots_of_unity:4", "--steps", "50", "--seed", "2")
    assert code == 0 and rep["body"]["accepted"] == 0
    code, rep, _ = call("kkt", "--zeros", "roots_of_unity:3", "--free-i0")
    assert code == 0 and rep["body"]["consistent"] is True
    assert all(c["agree"] for c in rep["body"]["halfplane"])


def test_disk():
    code, rep, _ = call("disk", "--zeros", "1 0 1; 0 1 1; -1 0 1; 0 -1 1")
    assert code == 0 and rep["body"]["radius"] == pytest.approx(1)


def test_contract_and_numeric_exit_codes():
    assert call("crit")[0] == 1
    assert call("crit", "--zeros", "1 0 1\n1 0 1")[0] == 1
    assert call("rank-sweep", "--stratum", "5:1,1/1")[0] == 1
    assert call("kkt", "--zeros", "1 0 1; -1 0 1")[0] == 1
    # a critical point inside tau_sep of a simple zero is a numeric degeneracy
    assert call("crit", "--zeros", "0 0 1; 1.5e-7 0 1; 0.5 0 1")[0] == 2


def test_main_maps_usage_errors():
    assert main(["no-such-command"]) == 1
    assert main(["sample", "--n", "notanint"]) == 1


def test_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "sample", "n": 4, "samples": 500, "seed": 3,
                               "tolerances": {"tau_sep": 1e-8}}))
    code, rep, _ = call("--config", str(cfg))
    assert code == 0 and rep["header"]["seed"] == 3 and rep["body"]["n"] == 4
    assert rep["header"]["tolerances"]["tau_sep"] == 1e-8
    # explicit flags override the file
    code, rep, _ = call("sample", "--config", str(cfg), "--seed", "5")
    assert rep["header"]["seed"] == 5
    cfg.write_text(json.dumps({"command": "sample", "bogus": 1}))
    assert call("--config", str(cfg))[0] == 1
    cfg.write_text(json.dumps({"command": "sample", "tolerances": {"nope": 1}}))
    assert call("--config", str(cfg))[0] == 1
    cfg.write_text("{ broken")
    assert call("--config", str(cfg))[0] == 1


def test_deterministic_report_body():
    a = call("sample", "--n", "5", "--samples", "3000", "--seed", "4")[2]
    b = call("sample", "--n", "5", "--samples", "3000", "--seed", "4")[2]
    assert a == b


def test_output_file_and_console_script(tmp_path):
    out = tmp_path / "rep.json"
    proc = subprocess.run([sys.executable, "-m", "sendovlab.cli", "crit", "--zeros", "roots_of_unity:3",
                           "--output", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == ""
    assert json.loads(out.read_text())["body"]["k"] == 1
