import pytest

from qnetid.svgplot import emit_plot
from qnetid.sweep import CSV_HEADER, SweepConfig, run_solvability_sweep

CFG = SweepConfig(seed=21, d_min=2, d_max=4, taus=(1.0,), subsamples=(5, 1), trials=4)


@pytest.fixture(scope="module")
def sweep_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("sweep") / "solv.csv"
    run_solvability_sweep(CFG, out_csv=path)
    return path


class TestEmitPlot:
    def test_writes_svg(self, sweep_csv, tmp_path):
        out = emit_plot(sweep_csv, "solvability", tmp_path / "plot.svg")
        text = out.read_text()
        assert text.startswith("<svg")
        assert text.rstrip().endswith("</svg>")
        assert "polyline" in text
        assert "mean solvability rate" in text
        assert "tau=1" in text

    def test_deterministic_bytes(self, sweep_csv, tmp_path):
        a = emit_plot(sweep_csv, "solvability", tmp_path / "a.svg")
        b = emit_plot(sweep_csv, "solvability", tmp_path / "b.svg")
        assert a.read_bytes() == b.read_bytes()

    def test_error_kind_log_axis(self, sweep_csv, tmp_path):
        out = emit_plot(sweep_csv, "error", tmp_path / "err.svg")
        assert "1e" in out.read_text()  # log-decade tick labels

    def test_single_cell_point_marker(self, tmp_path):
        cfg = SweepConfig(seed=2, d_min=3, d_max=3, taus=(1.0,), subsamples=(1,), trials=3)
        csv = tmp_path / "one.csv"
        run_solvability_sweep(cfg, out_csv=csv)
        out = emit_plot(csv, "solvability", tmp_path / "one.svg")
        text = out.read_text()
        assert "circle" in text
        assert "polyline" not in text  # single point, no line

    def test_empty_rows_error_no_file(self, tmp_path):
        csv = tmp_path / "empty.csv"
        csv.write_text(CSV_HEADER + "\n")
        target = tmp_path / "never.svg"
        with pytest.raises(ValueError, match="no plottable rows"):
            emit_plot(csv, "solvability", target)
        assert not target.exists()

    def test_malformed_csv_error(self, tmp_path):
        csv = tmp_path / "bad.csv"
        csv.write_text("not,a,sweep\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            emit_plot(csv, "solvability", tmp_path / "x.svg")

    def test_unknown_kind(self, sweep_csv, tmp_path):
        with pytest.raises(ValueError, match="kind"):
            emit_plot(sweep_csv, "banana", tmp_path / "x.svg")

    def test_embeds_config_comment(self, sweep_csv, tmp_path):
        out = emit_plot(sweep_csv, "solvability", tmp_path / "c.svg")
        assert '"seed": 21' in out.read_text()
