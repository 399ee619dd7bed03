import json

import pytest

from lvcfact.cli import main

SMALL_1D = """
[model]
coupling = constant
e1 = 9.45
e2 = 9.85
omega_x = 0.2578
kappa1 = -0.2121
kappa2 = 0.2546
lambda = 0.05

[grid.x]
q_min = -9
q_max = 9
n_points = 121

[solver]
n_states = 4

[verification]
n_points = 400
max_state = 1

[output]
field_states = 0 1
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text(SMALL_1D)
    return p


def test_usage_errors_exit_2(capsys):
    for argv in ([], ["bogus"], ["factorize", "butatriene_1d"], ["overlaps", "butatriene_1d"]):
        with pytest.raises(SystemExit) as err:
            main(argv)
        assert err.value.code == 2


def test_missing_config_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["spectrum", str(tmp_path / "none.cfg")])
    assert err.value.code == 2


def test_bad_family_and_state(small_cfg, tmp_path):
    for argv in (["overlaps", str(small_cfg), "--families", "exact,nope"],
                 ["overlaps", str(small_cfg), "--families", "exact,amplitude"],
                 ["factorize", str(small_cfg), "--state", "-1"]):
        with pytest.raises(SystemExit) as err:
            main(argv + ["--out", str(tmp_path)])
        assert err.value.code == 2


def test_spectrum(small_cfg, tmp_path, capsys):
    assert main(["spectrum", str(small_cfg), "--out", str(tmp_path), "--n-states", "3"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split()[:2] == ["n", "H"]
    table = json.loads((tmp_path / "energy_table.json").read_text())
    assert len(table["columns"]["H"]["values"]) == 3


def test_grid_points_override(small_cfg, tmp_path):
    assert main(["spectrum", str(small_cfg), "--out", str(tmp_path / "a"), "--grid-points", "61"]) == 0
    assert main(["spectrum", str(small_cfg), "--out", str(tmp_path / "b")]) == 0
    a = json.loads((tmp_path / "a" / "energy_table.json").read_text())["columns"]["H"]["values"]
    b = json.loads((tmp_path / "b" / "energy_table.json").read_text())["columns"]["H"]["values"]
    assert a != b


def test_factorize(small_cfg, tmp_path, capsys):
    assert main(["factorize", str(small_cfg), "--state", "1", "--out", str(tmp_path)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["n"] == 1 and "e0" in summary
    assert (tmp_path / "state001_summary.json").exists()
    assert any(p.name.startswith("state001_") and p.suffix == ".csv" for p in tmp_path.iterdir())


def test_overlaps(small_cfg, tmp_path, capsys):
    assert main(["overlaps", str(small_cfg), "--families", "exact,adiabatic", "--out", str(tmp_path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split() == ["m", "argmax", "|S|max", "cluster"] and len(lines) == 5
    data = json.loads((tmp_path / "overlaps_exact_adiabatic.json").read_text())
    assert data["rows"]["label"] and len(data["entries"]) == 4


def test_run_writes_artifacts(small_cfg, tmp_path):
    assert main(["run", str(small_cfg), "--out", str(tmp_path), "--seed", "3"]) == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert {"energy_table.json", "energy_table.txt", "report.json"} <= names
    assert any(n.startswith("overlaps_") for n in names)
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["converged"] and "born_huang_identity" in report["checks"]


def test_check_prints_criterion_lines(small_cfg, tmp_path, capsys):
    code = main(["check", str(small_cfg), "--out", str(tmp_path)])
    lines = [l for l in capsys.readouterr().out.splitlines() if "criterion" in l]
    assert lines and all(l.startswith(("[PASS]", "[FAIL]")) for l in lines)
    # four levels on a coarse grid cannot satisfy the ten-level criteria
    assert code == 1
