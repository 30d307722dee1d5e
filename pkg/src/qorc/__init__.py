"""Photonic quantum-reservoir forecasting of financial surfaces."""

from .autoencoder import SparseDenoisingAutoencoder
from .optics import enumerate_fock_basis, fock_dimension, output_distribution, permanent
from .pipeline import PipelineConfig, SurfaceForecaster, run_train
from .preprocess import RobustChainScaler
from .readout import RidgeReadout
from .reservoir import ENSEMBLE, SIMPLE_PML, QuantumReservoirFeatures, Reservoir, ReservoirSpec

__all__ = [
    "ENSEMBLE",
    "SIMPLE_PML",
    "PipelineConfig",
    "QuantumReservoirFeatures",
    "Reservoir",
    "ReservoirSpec",
    "RidgeReadout",
    "RobustChainScaler",
    "SparseDenoisingAutoencoder",
    "SurfaceForecaster",
    "enumerate_fock_basis",
    "fock_dimension",
    "output_distribution",
    "permanent",
    "run_train",
]

__version__ = "0.1.0"
