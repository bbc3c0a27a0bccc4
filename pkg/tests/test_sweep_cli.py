import csv
import io
import json

import pytest

from qphase import ConfigError, UnknownFigure
from qphase.cli import main
from qphase.sweep import (
    Axis,
    SweepConfig,
    config_from_mapping,
    evaluate_point,
    figure_config,
    rows_to_csv,
    run_sweep,
    validate_csv,
)


def _read(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestAxis:
    def test_inclusive_and_rounded(self):
        assert Axis("p", 0.1, 0.3, 0.1).values() == [0.1, 0.2, 0.3]
        assert len(Axis("p", 0.02, 0.98, 0.02).values()) == 49


class TestConfig:
    def test_header(self):
        cfg = SweepConfig("binomial", {"M": 3}, [Axis("p", 0.1, 0.5, 0.1)])
        assert cfg.header() == [
            "family", "p", "M", "n_bar", "var_n", "mean_a", "T", "U", "d_u", "antibunch", "hoa2", "hoa3", "status",
        ]

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(family="binomial", fixed={"M": 3}, axes=[]),
            dict(family="binomial", fixed={"M": 3}, axes=[Axis("q", 0.1, 0.5, 0.1)]),
            dict(family="binomial", fixed={"M": 3}, axes=[Axis("p", 0.5, 0.1, 0.1)]),
            dict(family="binomial", fixed={"M": 3}, axes=[Axis("p", 0.1, 0.5, 0.0)]),
            dict(family="binomial", fixed={}, axes=[Axis("p", 0.1, 0.5, 0.1)]),
            dict(family="binomial", fixed={"p": 0.2}, axes=[Axis("M", 1, 4, 0.5)]),
            dict(family="squeezed", fixed={}, axes=[Axis("p", 0.1, 0.5, 0.1)]),
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigError):
            SweepConfig(**kwargs)

    def test_grid_is_lexicographic(self):
        cfg = SweepConfig("binomial", {}, [Axis("p", 0.2, 0.4, 0.1), Axis("M", 1, 2, 1)])
        pts = [(g["p"], g["M"]) for g in cfg.grid()]
        assert pts == [(0.2, 1), (0.2, 2), (0.3, 1), (0.3, 2), (0.4, 1), (0.4, 2)]

    def test_from_mapping_list_axes(self):
        cfg = config_from_mapping({"family": "pacs", "axes": [["alpha", 0.1, 0.3, 0.1], ["m", 0, 2, 1]]})
        assert len(list(cfg.grid())) == 9


class TestRows:
    def test_status_rows(self):
        assert evaluate_point("binomial", {"p": 0.5, "M": 2}).status == "ok"
        bad = evaluate_point("hypergeometric", {"L": 10, "M": 5, "p": 0.2})
        assert bad.status == "domain_error" and not bad.metrics
        undef = evaluate_point("pacs", {"alpha": 0.0, "m": 2})
        assert undef.status == "phase_undefined"

    def test_failed_points_do_not_abort(self):
        cfg = SweepConfig("hypergeometric", {"L": 20, "M": 5}, [Axis("p", 0.1, 0.9, 0.1)])
        rows = run_sweep(cfg)
        assert len(rows) == 9
        assert {r.status for r in rows} == {"ok", "domain_error"}
        text = rows_to_csv(cfg, rows)
        for rec in _read(text):
            if rec["status"] != "ok":
                assert rec["d_u"] == "" and rec["U"] == ""
        assert validate_csv(text) == []

    def test_byte_deterministic_and_parallel_order(self):
        cfg = SweepConfig("negative_binomial", {}, [Axis("p", 0.3, 0.9, 0.1), Axis("M", 0, 3, 1)])
        serial = rows_to_csv(cfg, run_sweep(cfg))
        assert serial == rows_to_csv(cfg, run_sweep(cfg))
        assert serial == rows_to_csv(cfg, run_sweep(cfg, jobs=2))

    def test_twelve_significant_digits(self):
        cfg = SweepConfig("binomial", {"M": 2}, [Axis("p", 0.5, 0.6, 0.1)])
        rec = _read(rows_to_csv(cfg, run_sweep(cfg)))[0]
        assert rec["d_u"] == "0.0294372515229"
        assert rec["M"] == "2"

    def test_validator_flags_bad_rows(self):
        text = (
            "family,p,M,n_bar,var_n,mean_a,T,U,d_u,antibunch,hoa2,hoa3,status\n"
            "binomial,0.5,2,1,0.5,0.8,0.5,0.2,-0.3,0.1,0,0,ok\n"
        )
        problems = validate_csv(text)
        assert any("U below" in p for p in problems)
        assert any("antibunching" in p for p in problems)


class TestFigures:
    @pytest.mark.parametrize("fid", [1, 2, 3, 4, 5])
    def test_presets_build(self, fid):
        cfg = figure_config(fid)
        assert len(list(cfg.grid())) > 10

    def test_unknown(self):
        with pytest.raises(UnknownFigure):
            figure_config(6)

    def test_pacs_curves_ordered_in_m_above_crossover(self):
        rows = run_sweep(figure_config(3))
        by_alpha = {}
        for r in rows:
            by_alpha.setdefault(r.params["alpha"], {})[r.params["m"]] = r.metrics["d_u"]
        for alpha, curve in by_alpha.items():
            ordered = curve[0] > curve[1] > curve[2] > curve[3]
            # weak seeds: added photons dominate and the state looks number-like,
            # so the phase spread grows with m instead of shrinking
            assert ordered == (alpha >= 0.7), alpha


class TestCli:
    def test_report_binomial(self, capsys):
        assert main(["report", "--family", "binomial", "--p", "0.5", "--M", "2", "--format", "structured"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["d_u"] == pytest.approx(0.029437251523, abs=1e-11)
        assert out["antibunch"] == pytest.approx(-0.5)

    def test_report_coherent(self, capsys):
        assert main(["--format", "structured", "--epsilon", "1e-14", "report", "--family", "coherent", "--alpha", "2"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert abs(out["d_u"]) < 1e-9
        assert out["residual_mass"] < 1e-14

    def test_report_human_and_csv(self, capsys):
        assert main(["report", "--family", "hypergeometric", "--L", "40", "--M", "5", "--p", "0.5"]) == 0
        assert "d_u" in capsys.readouterr().out
        assert main(["report", "--family", "binomial", "--p", "0.5", "--M", "4", "--format", "csv"]) == 0
        rec = _read(capsys.readouterr().out)[0]
        assert float(rec["n_bar"]) == pytest.approx(2.0)

    def test_report_rejects_boundary(self, capsys):
        assert main(["report", "--family", "binomial", "--p", "1", "--M", "3"]) == 2
        assert "ParamError" in capsys.readouterr().err

    def test_report_missing_and_foreign_params(self):
        assert main(["report", "--family", "binomial", "--p", "0.5"]) == 2
        assert main(["report", "--family", "coherent", "--alpha", "1", "--M", "2"]) == 2

    def test_report_phase_undefined(self):
        assert main(["report", "--family", "pacs", "--alpha", "0", "--m", "2"]) == 2

    def test_verify_exit_codes(self, capsys):
        assert main(["verify", "--family", "binomial", "--p", "0.3", "--M", "10"]) == 0
        assert main(["verify", "--family", "generalized_binomial", "--alpha", "1", "--beta", "2", "--N", "5"]) == 3
        assert main(["verify", "--family", "pacs", "--alpha", "0", "--m", "1"]) == 4
        assert main(["verify", "--family", "pacs", "--alpha", "1", "--m", "0", "--quantity", "n_mean"]) == 0
        out = capsys.readouterr().out
        assert "Mismatch" in out and "ClosedFormUndefined" in out

    def test_verify_structured(self, capsys):
        main(["verify", "--family", "hypergeometric", "--L", "20", "--M", "5", "--p", "0.4", "--format", "structured"])
        rec = json.loads(capsys.readouterr().out)
        assert rec["verdict"] == "Mismatch" and rec["abs_diff"] > 0

    def test_sweep_flags(self, tmp_path):
        out = tmp_path / "s.csv"
        code = main(["sweep", "--family", "binomial", "--fixed", "M=4", "--axis", "p:0.1:0.9:0.1", "--out", str(out)])
        assert code == 0
        rows = _read(out.read_text())
        assert len(rows) == 9 and all(r["status"] == "ok" for r in rows)

    def test_sweep_config_file_with_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "family": "negative_binomial",
            "fixed": {"M": 1},
            "axes": [{"name": "p", "start": 0.2, "stop": 0.8, "step": 0.2}],
            "hoa_orders": [2],
            "output_path": str(tmp_path / "from_file.csv"),
        }))
        assert main(["sweep", "--config", str(cfg), "--fixed", "M=3"]) == 0
        rows = _read((tmp_path / "from_file.csv").read_text())
        assert [r["M"] for r in rows] == ["3"] * 4
        assert "hoa3" not in rows[0]

    def test_sweep_bad_config(self, tmp_path):
        assert main(["sweep", "--family", "binomial", "--axis", "p:0.1:0.9"]) == 2
        assert main(["sweep", "--config", str(tmp_path / "missing.json")]) == 5

    def test_figure_to_directory(self, tmp_path):
        assert main(["figure", "5", "--out", str(tmp_path) + "/"]) == 0
        assert validate_csv((tmp_path / "figure5.csv").read_text()) == []

    def test_figure_unknown(self):
        assert main(["figure", "7"]) == 2

    def test_io_error(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert main(["figure", "5", "--out", str(blocker / "x.csv")]) == 5
