import csv

import pytest

from corrdyn_plot import FigureSpec, render_figure
from corrdyn_plot.cli import main


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)


FIG4_COLUMNS = [
    "variant",
    "t_over_tau",
    "analytic_ref",
    "pipeline_value",
    "std_err",
    "band_lo",
    "band_hi",
]


def fig4_rows(variant="sym"):
    return [
        {
            "variant": variant,
            "t_over_tau": t,
            "analytic_ref": 0.02 * i,
            "pipeline_value": 0.02 * i + 0.003,
            "std_err": 0.002,
            "band_lo": 0.02 * i - 0.004,
            "band_hi": 0.02 * i + 0.008,
        }
        for i, t in enumerate([0.1, 1.0, 2.0, 3.0])
    ]


class TestSpecValidation:
    def test_unknown_figure(self):
        with pytest.raises(ValueError, match="unknown figure"):
            FigureSpec("fig9", ("x.csv",), "out.svg")

    def test_missing_file(self, tmp_path):
        spec = FigureSpec("fig4", (str(tmp_path / "none.csv"),), str(tmp_path / "o.svg"))
        with pytest.raises(ValueError, match="does not exist"):
            render_figure(spec)

    def test_missing_column_named(self, tmp_path):
        path = tmp_path / "bad.csv"
        rows = [dict(r) for r in fig4_rows()]
        for r in rows:
            del r["band_lo"]
        _write_csv(path, [c for c in FIG4_COLUMNS if c != "band_lo"], rows)
        spec = FigureSpec("fig4", (str(path),), str(tmp_path / "o.svg"))
        with pytest.raises(ValueError, match="missing column 'band_lo'"):
            render_figure(spec)


class TestSyntheticRendering:
    def test_fig4_three_variants(self, tmp_path):
        paths = []
        for variant in ("sym", "asym", "uncorr"):
            p = tmp_path / f"{variant}.csv"
            _write_csv(p, FIG4_COLUMNS, fig4_rows(variant))
            paths.append(str(p))
        out = tmp_path / "fig4.svg"
        render_figure(FigureSpec("fig4", tuple(paths), str(out)))
        assert out.stat().st_size > 0

    def test_cli_roundtrip(self, tmp_path):
        p = tmp_path / "sym.csv"
        _write_csv(p, FIG4_COLUMNS, fig4_rows())
        out = tmp_path / "fig4.svg"
        assert main(["--figure", "fig4", "--csv", str(p), "--out", str(out)]) == 0
        assert out.exists()

    def test_cli_schema_error_exit_code(self, tmp_path):
        p = tmp_path / "bad.csv"
        _write_csv(p, ["variant"], [{"variant": "sym"}])
        assert main(["--figure", "fig4", "--csv", str(p), "--out", str(tmp_path / "o.svg")]) == 2


class TestDeterminism:
    def test_svg_byte_identical_across_runs(self, tmp_path):
        p = tmp_path / "sym.csv"
        _write_csv(p, FIG4_COLUMNS, fig4_rows())
        outs = []
        for i in range(2):
            out = tmp_path / f"fig4_{i}.svg"
            render_figure(FigureSpec("fig4", (str(p),), str(out)))
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_pdf_data_layer_deterministic(self, tmp_path):
        p = tmp_path / "sym.csv"
        _write_csv(p, FIG4_COLUMNS, fig4_rows())
        outs = []
        for i in range(2):
            out = tmp_path / f"fig4_{i}.pdf"
            render_figure(FigureSpec("fig4", (str(p),), str(out)))
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
