"""Single-photon scattering on waveguide emitters and the quantum Mach-Zehnder interferometer."""

__version__ = "0.1.0"

from .analytic import QmzParams, p1_reflect, p2_transmit, qmz_probabilities  # noqa: E402
from .core import (  # noqa: E402
    EmitterParams,
    Envelope,
    Grid,
    PulseParams,
    auto_grid,
    detection_probability,
    make_exponential_pulse,
)
from .dynamics import scatter_qmz, scatter_single, simulate_qmz, simulate_single  # noqa: E402
from .transfer import LambdaParam, emitter_matrix, output_probabilities, qmz_matrix  # noqa: E402

__all__ = [
    "__version__",
    "QmzParams",
    "p1_reflect",
    "p2_transmit",
    "qmz_probabilities",
    "EmitterParams",
    "Envelope",
    "Grid",
    "PulseParams",
    "auto_grid",
    "detection_probability",
    "make_exponential_pulse",
    "scatter_qmz",
    "scatter_single",
    "simulate_qmz",
    "simulate_single",
    "LambdaParam",
    "emitter_matrix",
    "output_probabilities",
    "qmz_matrix",
]
