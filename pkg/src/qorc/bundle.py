"""Model bundle: a directory holding ``manifest.json`` and ``arrays/*.f8``.

Each array file is the raw row-major little-endian float64 buffer; the
manifest records its shape. Complex unitaries are stored as separate real
and imaginary arrays, boolean masks as 0.0 / 1.0. Reservoir unitaries and
projections are stored explicitly, so loading never touches the RNG.
"""

from __future__ import annotations

import json
import shutil
from pathlib import Path

import numpy as np

from .autoencoder import AEWeights, SparseDenoisingAutoencoder, TrainLog
from .pipeline import PipelineConfig, SurfaceForecaster
from .preprocess import RobustChainScaler
from .readout import RidgeReadout
from .reservoir import FeatureStandardizer, QuantumReservoirFeatures, Reservoir, ReservoirSpec

__all__ = ["FORMAT_VERSION", "model_arrays", "save_bundle", "load_bundle"]

FORMAT_VERSION = 1
_SCALER = ("lower_", "upper_", "median_", "iqr_", "min_", "max_", "zero_iqr_", "constant_")
_RIDGE = ("coef_", "intercept_", "feature_mean_", "target_mean_")


def model_arrays(model: SurfaceForecaster) -> dict[str, np.ndarray]:
    arrays = {}
    for attr in _SCALER:
        arrays[f"scaler.{attr.rstrip('_')}"] = getattr(model.scaler_, attr)
    w = model.autoencoder_.weights_
    for i, (W, b) in enumerate(zip(w.weights, w.biases)):
        arrays[f"ae.W{i}"] = W
        arrays[f"ae.b{i}"] = b
    if model.features_ is not None:
        for r in model.features_.reservoirs_:
            name = r.spec.label
            arrays[f"res.{name}.U1.real"] = r.U1.real
            arrays[f"res.{name}.U1.imag"] = r.U1.imag
            if r.U2 is not None:
                arrays[f"res.{name}.U2.real"] = r.U2.real
                arrays[f"res.{name}.U2.imag"] = r.U2.imag
            arrays[f"res.{name}.W"] = r.W
        std = model.features_.standardizer_
        arrays["std.mean"] = std.mean_
        arrays["std.scale"] = std.scale_
        arrays["std.constant"] = std.constant_
    for attr in _RIDGE:
        arrays[f"ridge.{attr.rstrip('_')}"] = getattr(model.readout_, attr)
    return {k: np.asarray(v, dtype="<f8") for k, v in arrays.items()}


def save_bundle(model: SurfaceForecaster, config: PipelineConfig, path) -> Path:
    path = Path(path)
    if path.exists():
        shutil.rmtree(path / "arrays", ignore_errors=True)
    (path / "arrays").mkdir(parents=True, exist_ok=True)
    arrays = model_arrays(model)
    index = {}
    for name, arr in arrays.items():
        fname = f"{name}.f8"
        (path / "arrays" / fname).write_bytes(np.ascontiguousarray(arr).tobytes())
        index[name] = {"file": f"arrays/{fname}", "shape": list(arr.shape), "dtype": "<f8"}

    reservoirs = []
    if model.features_ is not None:
        for r in model.features_.reservoirs_:
            reservoirs.append({
                "label": r.spec.label, "modes": r.spec.modes, "photons": r.spec.photons,
                "sandwich": r.spec.sandwich, "input_state": list(r.input_state),
                "n_features": r.n_features,
            })
    ae_log = model.autoencoder_.log_
    manifest = {
        "format_version": FORMAT_VERSION,
        "config": config.to_dict(),
        "model": {k: (list(v) if isinstance(v, tuple) else v)
                  for k, v in model.get_params().items()},
        "n_features_in": int(model.n_features_in_),
        "n_train_windows": int(model.n_train_windows_),
        "fit_rows": int(model.fit_rows_),
        "ae_sizes": list(model.autoencoder_.weights_.sizes),
        "ae_log": {"best_epoch": ae_log.best_epoch, "epochs_run": ae_log.epochs_run},
        "reservoirs": reservoirs,
        "arrays": index,
    }
    (path / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def load_bundle(path) -> tuple[SurfaceForecaster, PipelineConfig]:
    path = Path(path)
    manifest = json.loads((path / "manifest.json").read_text())
    if manifest.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported bundle format {manifest.get('format_version')}")

    def arr(name):
        meta = manifest["arrays"][name]
        data = np.frombuffer((path / meta["file"]).read_bytes(), dtype="<f8")
        return data.reshape(meta["shape"]).astype(np.float64)

    config = PipelineConfig.from_mapping(
        {k: tuple(v) if k == "hidden" else v for k, v in manifest["config"].items()})
    params = dict(manifest["model"])
    params["hidden"] = tuple(params["hidden"])
    model = SurfaceForecaster(**params)
    model.n_features_in_ = manifest["n_features_in"]
    model.n_train_windows_ = manifest["n_train_windows"]
    model.fit_rows_ = manifest["fit_rows"]

    scaler = RobustChainScaler()
    for attr in _SCALER:
        value = arr(f"scaler.{attr.rstrip('_')}")
        setattr(scaler, attr, value.astype(bool) if attr in ("zero_iqr_", "constant_") else value)
    scaler.n_features_in_ = scaler.median_.shape[0]
    model.scaler_ = scaler

    sizes = tuple(manifest["ae_sizes"])
    n_layers = len(sizes) - 1
    weights = AEWeights(sizes, [arr(f"ae.W{i}") for i in range(n_layers)],
                        [arr(f"ae.b{i}") for i in range(n_layers)])
    ae = SparseDenoisingAutoencoder.from_weights(weights, random_state=params["random_state"])
    ae.log_ = TrainLog(best_epoch=manifest["ae_log"]["best_epoch"],
                       epochs_run=manifest["ae_log"]["epochs_run"])
    model.autoencoder_ = ae

    if manifest["reservoirs"]:
        reservoirs = []
        for meta in manifest["reservoirs"]:
            spec = ReservoirSpec(meta["label"], meta["modes"], meta["photons"], meta["sandwich"])
            name = spec.label
            U1 = arr(f"res.{name}.U1.real") + 1j * arr(f"res.{name}.U1.imag")
            U2 = (arr(f"res.{name}.U2.real") + 1j * arr(f"res.{name}.U2.imag")
                  if spec.sandwich else None)
            reservoirs.append(Reservoir.from_parts(spec, U1, U2, arr(f"res.{name}.W"),
                                                   meta["input_state"]))
        feats = QuantumReservoirFeatures(specs=tuple(r.spec for r in reservoirs),
                                         random_state=params["random_state"])
        feats.reservoirs_ = reservoirs
        feats.n_features_in_ = reservoirs[0].W.shape[1]
        std = FeatureStandardizer()
        std.mean_, std.scale_ = arr("std.mean"), arr("std.scale")
        std.constant_ = arr("std.constant").astype(bool)
        std.n_features_in_ = std.mean_.shape[0]
        feats.standardizer_ = std
        model.features_ = feats
    else:
        model.features_ = None

    readout = RidgeReadout(params["alpha"])
    for attr in _RIDGE:
        setattr(readout, attr, arr(f"ridge.{attr.rstrip('_')}"))
    readout.n_features_in_ = readout.coef_.shape[1]
    model.readout_ = readout
    return model, config
