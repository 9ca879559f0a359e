"""Two-color interference stabilization of atoms with continuum-coupled bound levels."""

__version__ = "0.1.0"

from .atoms import AtomDataset, builtin_dataset, load_dataset, validate  # noqa: E402
from .dressed import DrivePoint, dressed_detuning, quasienergies, widths  # noqa: E402
from .pulses import EnvelopeSpec  # noqa: E402
from .dynamics import Outcome, propagate_ode, propagate_rectangular  # noqa: E402
from .optimal import LinearLaw, delta_opt, zero_detuning_point  # noqa: E402

__all__ = [
    "AtomDataset", "builtin_dataset", "load_dataset", "validate",
    "DrivePoint", "dressed_detuning", "quasienergies", "widths",
    "EnvelopeSpec", "Outcome", "propagate_ode", "propagate_rectangular",
    "LinearLaw", "delta_opt", "zero_detuning_point",
]
