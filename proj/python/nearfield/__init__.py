"""Near-field matter-wave interferometry.

Quantities are SI throughout; polarizabilities are volumes alpha / (4 pi eps0).
"""

from ._core import *  # noqa: F401,F403
from ._core import (
    ConfigError,
    DomainError,
    NearfieldError,
    run_scenario,
    run_scenario_text,
)

__all__ = [name for name in dir() if not name.startswith("_")]
