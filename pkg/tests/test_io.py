import numpy as np
import pytest

from qorc.bundle import load_bundle, save_bundle
from qorc.io import (
    CSVFormatError,
    SurfacePanel,
    export_report,
    format_table,
    grid_columns,
    parse_config_file,
    read_surfaces_csv,
    write_surfaces_csv,
)
from qorc.synthetic import generate_synthetic


def test_csv_round_trip(tmp_path):
    panel = generate_synthetic(12, seed=3)
    path = tmp_path / "s.csv"
    write_surfaces_csv(panel, path)
    header = path.read_text().splitlines()[0].split(",")
    assert len(header) == 225 and header[1] == "T01_M01" and header[-1] == "T14_M16"
    back = read_surfaces_csv(path)
    np.testing.assert_array_equal(back.values, panel.values)
    assert back.dates == panel.dates
    assert grid_columns()[16] == "T02_M01"


def _write(tmp_path, lines):
    path = tmp_path / "bad.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


HEADER = "date," + ",".join(grid_columns())
ROW = ",".join(["1.0"] * 224)


@pytest.mark.parametrize("lines, message", [
    ([HEADER, "2024-01-02," + ROW, "2024-01-03," + ROW[4:]], ":3: 224 cells"),
    ([HEADER, "2024-01-03," + ROW, "2024-01-02," + ROW], ":3: date 2024-01-02 is not after"),
    ([HEADER, "2024-01-02," + ",".join(["1.0"] * 223 + [""])], ":2: missing value in column 225"),
    ([HEADER, "2024-01-02,abc," + ROW[4:]], ":2: non-numeric value 'abc' in column 2"),
    ([HEADER, "2024-13-02," + ROW], ":2: bad date"),
    ([HEADER, "2024-01-02,nan," + ROW[4:]], ":2: non-finite"),
    (["date,a,b", "2024-01-02,1,2"], "expected 224 price columns, found 2"),
    ([HEADER], "no data rows"),
])
def test_csv_rejects_with_location(tmp_path, lines, message):
    with pytest.raises(CSVFormatError, match=message.replace("(", r"\(")):
        read_surfaces_csv(_write(tmp_path, lines))


def test_panel_validation():
    with pytest.raises(ValueError):
        SurfacePanel(np.ones((2, 3)), ["2024-01-01"])
    with pytest.raises(ValueError):
        SurfacePanel(np.array([[1.0, np.nan]]), ["2024-01-01"])


def test_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nseed = 7\nhidden = (32, 16)\nvariant = classical  # bare\n"
                    "mask_rescale = False\n\nalpha = 1e-2\n")
    assert parse_config_file(path) == {"seed": 7, "hidden": (32, 16), "variant": "classical",
                                       "mask_rescale": False, "alpha": 0.01}
    path.write_text("seed 7\n")
    with pytest.raises(ValueError, match=":1:"):
        parse_config_file(path)


def test_report_export(tmp_path):
    report = {"variant": "qorc", "seed": 1,
              "test": {"latent_mse": 0.5, "surface_rmse": 1.25, "r2": 0.9, "n_samples": 6},
              "baselines": {"test_train_mean_rmse": 3.0}}
    js, txt = export_report(report, tmp_path)
    assert js.exists()
    text = txt.read_text()
    assert "test_train_mean_rmse" in text and "1.25" in text
    assert format_table([]) == ""


def test_bundle_round_trip(tmp_path, default_run, panel):
    from qorc.pipeline import PipelineConfig

    model = default_run.model
    path = save_bundle(model, PipelineConfig(), tmp_path / "b")
    loaded, config = load_bundle(path)
    assert config == PipelineConfig()
    np.testing.assert_array_equal(loaded.predict(panel.values[-20:]),
                                  model.predict(panel.values[-20:]))
    assert loaded.n_readout_features == 1335
    # saving the reloaded model reproduces the same bytes
    path2 = save_bundle(loaded, config, tmp_path / "b2")
    for f in sorted((path / "arrays").iterdir()):
        assert f.read_bytes() == (path2 / "arrays" / f.name).read_bytes()
    assert (path / "manifest.json").read_text() == (path2 / "manifest.json").read_text()


def test_bundle_version_check(tmp_path, default_run):
    from qorc.pipeline import PipelineConfig

    path = save_bundle(default_run.model, PipelineConfig(), tmp_path / "b")
    manifest = path / "manifest.json"
    manifest.write_text(manifest.read_text().replace('"format_version": 1', '"format_version": 99'))
    with pytest.raises(ValueError, match="unsupported"):
        load_bundle(path)
