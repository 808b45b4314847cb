"""Command line interface: exit codes, config handling, CSV determinism."""

import math

import numpy as np
import pytest

from curlab import cli
from curlab import currents as cur
from curlab import examples as ex


def _read_rows(path):
    """Header comment lines and parsed csv rows of an output file."""
    header, rows = [], []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            header.append(line)
        elif line:
            rows.append(line.split(","))
    return header, rows


def _stable_bytes(path):
    """File content with the timestamp line removed."""
    lines = [l for l in path.read_text().splitlines(keepends=True)
             if not l.startswith("# generated")]
    return "".join(lines)


def test_mass_flat_disk(tmp_path):
    rc = cli.run(["mass", "--example", "flat-disk", "--h", "0.05",
                  "--out", str(tmp_path), "--n", "4"])
    assert rc == 0
    out = tmp_path / "mass.csv"
    header, rows = _read_rows(out)
    assert header[0].startswith("# curlab ")
    assert rows[0] == ["r", "mass"]
    for r_s, m_s in rows[1:-1]:
        assert float(m_s) == pytest.approx(math.pi * float(r_s) ** 2, rel=1e-4)
    assert rows[-1][0] == "inf"


def test_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    argv = ["density-sweep", "--example", "graph-z2", "--h", "0.05",
            "--seed", "3", "--n", "5"]
    assert cli.run(argv + ["--out", str(a)]) == 0
    assert cli.run(argv + ["--out", str(b)]) == 0
    fa, fb = a / "density_sweep.csv", b / "density_sweep.csv"
    assert _stable_bytes(fa) == _stable_bytes(fb)
    assert "# seed: 3" in fa.read_text()


def test_monotonicity_passes(tmp_path):
    rc = cli.run(["monotonicity", "--example", "two-lines", "--h", "0.05",
                  "--out", str(tmp_path)])
    assert rc == 0
    _, rows = _read_rows(tmp_path / "monotonicity.csv")
    assert all(row[-1] == "true" for row in rows[1:])
    assert all(row[-2] == "0" for row in rows[1:])


def test_defect_check_failure(tmp_path, capsys):
    # a mesh too coarse for its curvature leaves a real calibration defect
    rc = cli.run(["defect", "--example", "graph-z2", "--h", "0.15",
                  "--out", str(tmp_path)])
    assert rc == 2
    assert "check failed" in capsys.readouterr().err


def test_defect_passes(tmp_path):
    rc = cli.run(["defect", "--example", "nonholo-graph", "--h", "0.06",
                  "--out", str(tmp_path)])
    assert rc == 0
    _, rows = _read_rows(tmp_path / "defect.csv")
    assert float(rows[1][2]) <= 1e-6


def test_unknown_example(tmp_path, capsys):
    rc = cli.run(["mass", "--example", "no-such-thing", "--out", str(tmp_path)])
    assert rc == 1
    assert not (tmp_path / "mass.csv").exists()


def test_off_support_center(tmp_path, capsys):
    rc = cli.run(["monotonicity", "--example", "flat-disk",
                  "--center", "5,0,0,0", "--out", str(tmp_path)])
    assert rc == 1
    assert "support" in capsys.readouterr().err


def test_bad_ladder_parameters(tmp_path):
    rc = cli.run(["mass", "--example", "flat-disk", "--q", "1.2",
                  "--out", str(tmp_path)])
    assert rc == 1
    rc = cli.run(["mass", "--example", "flat-disk", "--n", "2",
                  "--out", str(tmp_path)])
    assert rc == 1


def test_bad_flag_exit_code(capsys):
    with pytest.raises(SystemExit) as e:
        cli.run(["mass", "--no-such-flag"])
    assert e.value.code == 1


def test_missing_subcommand(capsys):
    assert cli.run([]) == 1


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# ladder setup\n"
        "example = flat-disk\n"
        "r-max = 0.4   # hyphen form accepted\n"
        "n = 4\n"
    )
    rc = cli.run(["mass", "--config", str(cfg), "--h", "0.1",
                  "--out", str(tmp_path)])
    assert rc == 0
    _, rows = _read_rows(tmp_path / "mass.csv")
    assert float(rows[1][0]) == pytest.approx(0.4)
    # a flag overrides the config entry
    rc = cli.run(["mass", "--config", str(cfg), "--h", "0.1",
                  "--r-max", "0.2", "--out", str(tmp_path)])
    assert rc == 0
    _, rows = _read_rows(tmp_path / "mass.csv")
    assert float(rows[1][0]) == pytest.approx(0.2)


def test_config_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("example = flat-disk\nwibble = 3\n")
    rc = cli.run(["mass", "--config", str(cfg), "--out", str(tmp_path)])
    assert rc == 1
    assert "wibble" in capsys.readouterr().err


def test_config_rejects_bad_line(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("just some words\n")
    rc = cli.run(["mass", "--config", str(cfg), "--out", str(tmp_path)])
    assert rc == 1


def test_mesh_file_input(tmp_path):
    C = ex.flat_disk(h=0.1)
    mesh = tmp_path / "disk.txt"
    cur.write_mesh(mesh, C)
    rc = cli.run(["mass", "--mesh", str(mesh), "--n", "4",
                  "--out", str(tmp_path)])
    assert rc == 0
    _, rows = _read_rows(tmp_path / "mass.csv")
    assert float(rows[-1][1]) == pytest.approx(cur.mass(C), rel=1e-12)


def test_mesh_file_missing(tmp_path, capsys):
    rc = cli.run(["mass", "--mesh", str(tmp_path / "nope.txt"),
                  "--out", str(tmp_path)])
    assert rc == 1


def test_directions_output(tmp_path):
    rc = cli.run(["directions", "--example", "two-lines", "--h", "0.05",
                  "--radius", "0.5", "--out", str(tmp_path)])
    assert rc == 0
    header, rows = _read_rows(tmp_path / "directions.csv")
    assert len(rows) - 1 == 2
    weights = [float(r[1]) for r in rows[1:]]
    assert np.allclose(weights, 1.0, atol=0.05)
    assert any(line.startswith("# stable:") for line in header)


def test_rate_fit_output(tmp_path):
    rc = cli.run(["rate-fit", "--example", "graph-z2", "--h", "0.02",
                  "--gauge", "cylinder", "--mode", "A", "--theta-hat",
                  str(math.pi), "--out", str(tmp_path)])
    assert rc == 0
    _, rows = _read_rows(tmp_path / "rate_fit.csv")
    assert float(rows[1][2]) == pytest.approx(2.0, abs=0.1)


def test_jholo_energy_and_rate(tmp_path):
    rc = cli.run(["jholo-energy", "--example", "z1", "--n", "6",
                  "--out", str(tmp_path)])
    assert rc == 0
    _, rows = _read_rows(tmp_path / "jholo_energy.csv")
    for r_s, e_s in rows[1:]:
        assert float(e_s) == pytest.approx(
            math.pi**2 * float(r_s) ** 2, rel=0.01
        )
    rc = cli.run(["jholo-rate", "--example", "z1z2", "--mode", "A",
                  "--theta-hat", "0", "--out", str(tmp_path)])
    assert rc == 0
    _, rows = _read_rows(tmp_path / "jholo_rate.csv")
    assert float(rows[1][2]) == pytest.approx(4.0, abs=0.1)


def test_jholo_unknown_map(tmp_path):
    rc = cli.run(["jholo-energy", "--example", "flat-disk",
                  "--out", str(tmp_path)])
    assert rc == 1


def test_jholo_ladder_beyond_grid(tmp_path):
    rc = cli.run(["jholo-energy", "--example", "z1", "--r-max", "2.0",
                  "--out", str(tmp_path)])
    assert rc == 1
