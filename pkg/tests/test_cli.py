import csv
import json

import pytest

from afacoustics.cli import main, op_tag, parse_op_spec, read_config
from afacoustics.evolution import EvolutionConfig


class TestConfigParsing:
    def test_read_config(self, tmp_path):
        f = tmp_path / "a.cfg"
        f.write_text("problem=example1  # comment\n\n# full comment\ncfl=0.3\n")
        assert read_config(f) == {"problem": "example1", "cfl": "0.3"}

    def test_read_config_rejects_garbage(self, tmp_path):
        f = tmp_path / "a.cfg"
        f.write_text("problem example1\n")
        with pytest.raises(ValueError):
            read_config(f)

    def test_op_spec(self):
        kw, cfl = parse_op_spec("eg2delta:0.7@0.418")
        assert kw == {"kind": "eg2delta", "delta": 0.7} and cfl == 0.418
        kw, cfl = parse_op_spec("eg2deltanu:0.8:0.2@0.439")
        assert kw["nu"] == 0.2
        kw, cfl = parse_op_spec("eg2quad", default_cfl=0.5)
        assert cfl == 0.5

    def test_op_tag(self):
        assert op_tag(EvolutionConfig(kind="eg2quad")) == "eg2quad"
        assert op_tag(EvolutionConfig(kind="eg2delta", delta=0.7)) == "eg2delta_0.7"
        assert op_tag(EvolutionConfig(kind="eg2deltanu", delta=0.8, nu=0.2)) == \
            "eg2deltanu_0.8_0.2"


class TestRunCommand:
    def test_smoke_example4(self, tmp_path):
        rc = main(["run", "--problem", "example4", "--recon", "af",
                   "--op", "eg2quad", "--cfl", "0.276", "--nx", "16",
                   "--tend", "0.05", "--out-dir", str(tmp_path),
                   "--name", "smoke"])
        assert rc == 0
        snap = tmp_path / "smoke_t0.05.csv"
        assert snap.exists()
        with open(snap) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x", "y", "p", "u", "v", "speed"]
        assert len(rows) == 1 + 16 * 16
        manifest = json.loads((tmp_path / "smoke_manifest.json").read_text())
        for name in manifest["outputs"]:
            assert (tmp_path / name).exists()
        assert (tmp_path / "smoke_xsec_y0.csv").exists()
        assert (tmp_path / "smoke_xsec_diag.csv").exists()

    def test_invalid_operator_lists_kinds(self, tmp_path, capsys):
        rc = main(["run", "--problem", "example1", "--op", "eg7",
                   "--cfl", "0.2", "--nx", "8", "--tend", "0.01",
                   "--out-dir", str(tmp_path)])
        assert rc == 2
        err = capsys.readouterr().err
        assert "eg2quad" in err and "hat-eg2deltanu" in err

    def test_missing_required_setting(self, tmp_path):
        rc = main(["run", "--problem", "example1", "--op", "eg2",
                   "--nx", "8", "--tend", "0.01", "--out-dir", str(tmp_path)])
        assert rc == 2

    def test_blowup_exit_code(self, tmp_path):
        rc = main(["run", "--problem", "example2", "--op", "eg2",
                   "--cfl", "0.62", "--nx", "6", "--tend", "2000",
                   "--out-dir", str(tmp_path)])
        assert rc == 3

    def test_config_file_with_override(self, tmp_path):
        cfgf = tmp_path / "run.cfg"
        cfgf.write_text("problem=example1\nop=eg2quad\ncfl=0.25\n"
                        "nx=8\ntend=0.02\n")
        rc = main(["run", "--config", str(cfgf), "--tend", "0.01",
                   "--out-dir", str(tmp_path), "--name", "cfgd"])
        assert rc == 0
        manifest = json.loads((tmp_path / "cfgd_manifest.json").read_text())
        assert manifest["config"]["tend"] == "0.01"
        assert manifest["summary"]["l1_errors"]["p"] > 0

    def test_unknown_config_key(self, tmp_path):
        cfgf = tmp_path / "run.cfg"
        cfgf.write_text("problem=example1\nfoo=1\n")
        rc = main(["run", "--config", str(cfgf), "--op", "eg2", "--cfl", "0.2",
                   "--nx", "8", "--tend", "0.01", "--out-dir", str(tmp_path)])
        assert rc == 2


class TestConvergeCommand:
    def test_smoke(self, tmp_path):
        rc = main(["converge", "--problem", "example1", "--op", "eg2",
                   "--cfl", "0.25", "--tend", "0.02", "--resolutions", "8,16",
                   "--out-dir", str(tmp_path), "--name", "conv"])
        assert rc == 0
        path = tmp_path / "conv_eg2.csv"
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["nx", "ny", "l1_p", "l1_u", "l1_v",
                           "eoc_p", "eoc_u", "eoc_v"]
        assert rows[1][5] == ""              # no EOC on the first row
        assert float(rows[2][5]) > 1.0       # some positive measured order

    def test_multi_op_spec(self, tmp_path):
        rc = main(["converge", "--problem", "example1",
                   "--ops", "eg2@0.25,eg2delta:0.7@0.4",
                   "--tend", "0.02", "--resolutions", "8,16",
                   "--out-dir", str(tmp_path), "--name", "multi"])
        assert rc == 0
        assert (tmp_path / "multi_eg2.csv").exists()
        assert (tmp_path / "multi_eg2delta_0.7.csv").exists()

    def test_rejects_problem_without_exact(self, tmp_path):
        rc = main(["converge", "--problem", "example3", "--op", "eg2",
                   "--cfl", "0.25", "--tend", "0.02",
                   "--out-dir", str(tmp_path)])
        assert rc == 2


class TestStabilityCommand:
    def test_smoke_and_determinism(self, tmp_path):
        args = ["stability", "--op", "eg2", "--m", "8",
                "--cfl-lo", "0.05", "--cfl-hi", "0.6", "--tol", "2e-3",
                "--out-dir", str(tmp_path), "--name", "stab"]
        assert main(args) == 0
        first = (tmp_path / "stab_cfl.csv").read_bytes()
        assert main(args) == 0
        assert (tmp_path / "stab_cfl.csv").read_bytes() == first
        with open(tmp_path / "stab_cfl.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["operator", "delta", "nu", "cfl_max"]
        assert 0.2 < float(rows[1][3]) < 0.35

    def test_bracket_error_exit_code(self, tmp_path):
        rc = main(["stability", "--op", "eg2", "--m", "8",
                   "--cfl-lo", "0.5", "--cfl-hi", "0.8",
                   "--out-dir", str(tmp_path)])
        assert rc == 4


class TestEigsCommand:
    def test_smoke(self, tmp_path):
        rc = main(["eigs", "--op", "eg2", "--cfl", "0.25", "--m", "8",
                   "--out-dir", str(tmp_path), "--name", "eig"])
        assert rc == 0
        with open(tmp_path / "eig_eigs.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["re", "im"]
        assert len(rows) == 1 + 12 * 8 * 8
        manifest = json.loads((tmp_path / "eig_manifest.json").read_text())
        assert manifest["summary"]["stable"] is True

    def test_dense_matches_symbol_radius(self, tmp_path):
        rc = main(["eigs", "--op", "eg2", "--cfl", "0.2", "--m", "6",
                   "--dense", "--out-dir", str(tmp_path), "--name", "dense"])
        assert rc == 0
        m1 = json.loads((tmp_path / "dense_manifest.json").read_text())
        rc = main(["eigs", "--op", "eg2", "--cfl", "0.2", "--m", "6",
                   "--out-dir", str(tmp_path), "--name", "sym"])
        assert rc == 0
        m2 = json.loads((tmp_path / "sym_manifest.json").read_text())
        assert m1["summary"]["spectral_radius"] == pytest.approx(
            m2["summary"]["spectral_radius"], abs=1e-9)
