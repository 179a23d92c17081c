"""Numerical wave packet transforms on the cosphere bundle of R^2 and the
equivalent norms of the Hardy spaces for Fourier integral operators."""
from .config import RunConfig, parse_config, serialize_config
from .geometry import DirectionSet, ScaleLadder
from .grid import GridSpec, SpatialField, SpectralField
from .norms import measure
from .packets import PacketFamily
from .suite import generate_suite
from .transforms import adjoint, half_wave, reproduce, transform

__all__ = [
    "GridSpec",
    "SpatialField",
    "SpectralField",
    "DirectionSet",
    "ScaleLadder",
    "PacketFamily",
    "transform",
    "adjoint",
    "reproduce",
    "half_wave",
    "measure",
    "generate_suite",
    "RunConfig",
    "parse_config",
    "serialize_config",
]

__version__ = "0.1.0"
