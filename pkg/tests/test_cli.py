"""End-to-end runs of the configuration-driven command line."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from speclab.cli import ConfigError, main, parse_config, run_config
from speclab.fdlab import lshape_domain, write_mask_file


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload, indent=2))
    return path


def interval_block(name="rod", checks=None, count=10):
    return {
        "name": name,
        "domain": {"type": "interval", "length": 2.0},
        "kinds": ["neumann", "dirichlet", "clamped", "buckling"],
        "backend": {"type": "analytic"},
        "count": count,
        "checks": checks or [],
    }


class TestParseConfig:
    def test_minimal_config(self):
        exps = parse_config(json.dumps({"experiments": [interval_block()]}))
        assert len(exps) == 1
        assert exps[0].name == "rod"
        assert exps[0].count == 10

    def test_reports_json_error_position(self):
        with pytest.raises(ConfigError, match="line"):
            parse_config('{"experiments": [,]}')

    def test_duplicate_names_rejected(self):
        block = interval_block()
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(json.dumps({"experiments": [block, block]}))

    def test_unknown_check_rejected(self):
        block = interval_block(checks=[{"type": "outlandish"}])
        with pytest.raises(ConfigError, match="unknown check"):
            parse_config(json.dumps({"experiments": [block]}))

    def test_chain_needs_all_kinds(self):
        block = interval_block(checks=[{"type": "chain"}])
        block["kinds"] = ["dirichlet", "buckling"]
        with pytest.raises(ConfigError, match="four"):
            parse_config(json.dumps({"experiments": [block]}))

    def test_rect_analytic_membrane_only(self):
        block = {
            "name": "sq",
            "domain": {"type": "rect", "a": 1.0, "b": 1.0},
            "kinds": ["clamped"],
            "backend": {"type": "analytic"},
        }
        with pytest.raises(ConfigError, match="membrane"):
            parse_config(json.dumps({"experiments": [block]}))

    def test_fd_needs_h_list_except_for_masks(self):
        block = {
            "name": "sq",
            "domain": {"type": "rect", "a": 1.0, "b": 1.0},
            "kinds": ["dirichlet"],
            "backend": {"type": "fd"},
        }
        with pytest.raises(ConfigError, match="'h'"):
            parse_config(json.dumps({"experiments": [block]}))
        block["backend"] = {"type": "fd", "h": [0.1]}
        parse_config(json.dumps({"experiments": [block]}))
        mask_block = {
            "name": "m",
            "domain": {"type": "mask", "path": "x.mask"},
            "kinds": ["dirichlet"],
            "backend": {"type": "fd", "h": [0.1]},
        }
        with pytest.raises(ConfigError, match="mesh width"):
            parse_config(json.dumps({"experiments": [mask_block]}))

    def test_weyl2_rejects_fd_backend(self):
        block = {
            "name": "sq",
            "domain": {"type": "rect", "a": 1.0, "b": 1.0},
            "kinds": ["dirichlet"],
            "backend": {"type": "fd", "h": [0.1]},
            "checks": [{"type": "weyl2"}],
        }
        with pytest.raises(ConfigError, match="analytic"):
            parse_config(json.dumps({"experiments": [block]}))


class TestMainRuns:
    def test_interval_spectrum_csv(self, tmp_path):
        config = write_config(tmp_path, {"experiments": [interval_block()]})
        out = tmp_path / "out"
        assert main(["spectrum", "--config", str(config), "--out", str(out)]) == 0
        lines = (out / "rod.spectra.csv").read_text().splitlines()
        assert lines[0] == "k,kind,value,source,h"
        assert len(lines) == 1 + 4 * 10
        report = json.loads((out / "rod.report.json").read_text())
        assert report["ok"] is True
        assert report["checks"] == []
        assert report["domain"] == "interval(L=2)"

    def test_runs_are_deterministic(self, tmp_path):
        payload = {
            "experiments": [
                interval_block(),
                {
                    "name": "grid",
                    "domain": {"type": "rect", "a": 1.0, "b": 1.0},
                    "kinds": ["dirichlet", "neumann"],
                    "backend": {"type": "fd", "h": [0.125]},
                    "count": 4,
                },
            ]
        }
        config = write_config(tmp_path, payload)
        outs = []
        for sub in ("one", "two"):
            out = tmp_path / sub
            assert main(["report", "--config", str(config), "--out", str(out)]) == 0
            outs.append(out)
        for name in ("rod.spectra.csv", "rod.report.json", "grid.spectra.csv", "grid.report.json"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()

    def test_empty_experiment_list(self, tmp_path):
        config = write_config(tmp_path, {"experiments": []})
        out = tmp_path / "out"
        assert main(["report", "--config", str(config), "--out", str(out)]) == 0
        assert not out.exists()

    def test_parse_error_exit_code(self, tmp_path, capsys):
        config = tmp_path / "broken.json"
        config.write_text('{"experiments": [}')
        assert main(["report", "--config", str(config)]) == 2
        err = capsys.readouterr().err
        assert "speclab:" in err and "line" in err

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["report", "--config", str(tmp_path / "nope.json")]) == 2
        assert "cannot read config" in capsys.readouterr().err

    def test_failing_asserted_check_exits_one(self, tmp_path):
        block = {
            "name": "sq",
            "domain": {"type": "rect", "a": 1.0, "b": 1.0},
            "kinds": ["dirichlet"],
            "backend": {"type": "analytic"},
            "count": 200,
            "checks": [{"type": "weyl", "rtol": 1e-6}],
        }
        config = write_config(tmp_path, {"experiments": [block]})
        out = tmp_path / "out"
        assert main(["weyl", "--config", str(config), "--out", str(out)]) == 1
        report = json.loads((out / "sq.report.json").read_text())
        assert report["ok"] is False
        assert report["checks"][0]["asserted"] is True
        assert report["checks"][0]["ok"] is False

    def test_runtime_error_is_isolated(self, tmp_path):
        bad = interval_block(
            name="bad", checks=[{"type": "weyl", "window": [1.0, 1e9]}]
        )
        payload = {"experiments": [bad, interval_block(name="good")]}
        config = write_config(tmp_path, payload)
        out = tmp_path / "out"
        assert main(["report", "--config", str(config), "--out", str(out)]) == 2
        bad_report = json.loads((out / "bad.report.json").read_text())
        assert "TrustRangeError" in bad_report["error"]
        assert not (out / "bad.spectra.csv").exists()
        good_report = json.loads((out / "good.report.json").read_text())
        assert good_report["ok"] is True
        assert (out / "good.spectra.csv").exists()

    def test_verb_filtering(self, tmp_path):
        block = interval_block(checks=[{"type": "chain"}, {"type": "weyl", "window": [10.0, 1000.0]}])
        block["count"] = 40
        config = write_config(tmp_path, {"experiments": [block]})
        out_verify = tmp_path / "verify"
        assert main(["verify", "--config", str(config), "--out", str(out_verify)]) == 0
        checks = json.loads((out_verify / "rod.report.json").read_text())["checks"]
        assert [c["check"] for c in checks] == ["chain"]
        out_weyl = tmp_path / "weyl"
        assert main(["weyl", "--config", str(config), "--out", str(out_weyl)]) == 0
        checks = json.loads((out_weyl / "rod.report.json").read_text())["checks"]
        assert [c["check"] for c in checks] == ["weyl"]

    def test_two_grid_uncertainty_reaches_report(self, tmp_path):
        block = {
            "name": "sq",
            "domain": {"type": "rect", "a": 1.0, "b": 1.0},
            "kinds": ["neumann", "dirichlet", "clamped", "buckling"],
            "backend": {"type": "fd", "h": [0.0625, 0.03125]},
            "count": 4,
            "checks": [{"type": "chain"}],
        }
        config = write_config(tmp_path, {"experiments": [block]})
        out = tmp_path / "out"
        assert main(["verify", "--config", str(config), "--out", str(out)]) == 0
        report = json.loads((out / "sq.report.json").read_text())
        chain = report["checks"][0]
        assert chain["ok"] is True
        assert set(chain["uncertainty"]) == {"neumann", "dirichlet", "clamped", "buckling"}
        assert all(u > 0 for u in chain["uncertainty"]["dirichlet"])
        lines = (out / "sq.spectra.csv").read_text().splitlines()
        # both grid levels are tabulated
        assert len(lines) == 1 + 2 * 4 * 4
        assert {line.split(",")[4] for line in lines[1:]} == {"0.0625", "0.03125"}

    def test_decomposition_with_offset_parts(self, tmp_path):
        block = {
            "name": "split",
            "domain": {"type": "rect", "a": 1.0, "b": 1.0},
            "kinds": ["buckling"],
            "backend": {"type": "fd", "h": [0.0625]},
            "count": 4,
            "checks": [
                {
                    "type": "decomposition",
                    "parts": [
                        {"type": "rect", "a": 0.5, "b": 1.0},
                        {"type": "rect", "a": 0.5, "b": 1.0, "corner": [0.5, 0.0]},
                    ],
                }
            ],
        }
        config = write_config(tmp_path, {"experiments": [block]})
        out = tmp_path / "out"
        assert main(["verify", "--config", str(config), "--out", str(out)]) == 0
        check = json.loads((out / "split.report.json").read_text())["checks"][0]
        assert check["ok"] is True
        assert all(row["margin"] > 0 for row in check["rows"])

    def test_mask_domain_through_cli(self, tmp_path):
        mask_path = tmp_path / "ell.mask"
        write_mask_file(lshape_domain(1.0, 1.0, 1.0 / 8.0), mask_path)
        block = {
            "name": "ell",
            "domain": {"type": "mask", "path": str(mask_path)},
            "kinds": ["dirichlet"],
            "backend": {"type": "fd"},
            "count": 4,
        }
        config = write_config(tmp_path, {"experiments": [block]})
        out = tmp_path / "out"
        assert main(["spectrum", "--config", str(config), "--out", str(out)]) == 0
        lines = (out / "ell.spectra.csv").read_text().splitlines()
        assert len(lines) == 5
        assert lines[1].split(",")[3] == "fd(h=0.125)"

    def test_parallel_jobs(self, tmp_path):
        payload = {
            "experiments": [interval_block(name="a"), interval_block(name="b")]
        }
        config = write_config(tmp_path, payload)
        out = tmp_path / "out"
        code = main(
            ["spectrum", "--config", str(config), "--out", str(out), "--jobs", "2"]
        )
        assert code == 0
        assert (out / "a.spectra.csv").exists() and (out / "b.spectra.csv").exists()

    def test_run_config_rejects_bad_jobs(self, tmp_path):
        with pytest.raises(ConfigError, match="jobs"):
            run_config([], tmp_path, jobs=0)


class TestSubprocess:
    def test_module_entry_point(self, tmp_path):
        config = write_config(tmp_path, {"experiments": [interval_block(count=6)]})
        out = tmp_path / "out"
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "speclab.cli",
                "spectrum",
                "--config",
                str(config),
                "--out",
                str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert (out / "rod.spectra.csv").exists()
