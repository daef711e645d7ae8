"""Figures of merit derived from a (steady) state.

Negative two-photon values, a possible artifact of the truncated hierarchy,
are reported as-is and flagged through Observables.physical; nothing is
clamped silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .dynamics import DynamicState, two_photon_expectation
from .errors import VacuumUndefined
from .model import ModelParams

# Photon number below which g2(0) is reported as undefined instead of an
# unstable 0/0 quotient.
PHOTON_FLOOR = 1e-15


def g2_zero(state: DynamicState) -> float:
    """Second-order correlation at zero delay, <a+a+aa> / <a+a>^2.

    Raises VacuumUndefined when n_p is at or below PHOTON_FLOOR.
    """
    n_p = state.n_p
    if not n_p > PHOTON_FLOOR:
        raise VacuumUndefined(
            f"g2(0) undefined for n_p = {n_p!r} (floor {PHOTON_FLOOR})"
        )
    return two_photon_expectation(state) / (n_p * n_p)


def output_rate(state: DynamicState, params: ModelParams) -> float:
    """Photon flux out of the cavity, 2 gamma_c n_p, in 1/ps."""
    return 2.0 * params.gamma_c * state.n_p


@dataclass(frozen=True)
class Observables:
    """Bundle of derived quantities for one state.

    g2_zero is None when the state has no photons to correlate (the CSV
    writer renders that as the literal token "undefined").
    """

    photon_number: float
    two_photon: float
    g2_zero: Optional[float]
    output_rate: float

    @property
    def physical(self) -> bool:
        """True when photon_number and two_photon are both non-negative."""
        return self.photon_number >= 0.0 and self.two_photon >= 0.0


def observables_of(state: DynamicState, params: ModelParams) -> Observables:
    """Observables for a state; g2 carries the undefined marker in vacuum."""
    try:
        g2: Optional[float] = g2_zero(state)
    except VacuumUndefined:
        g2 = None
    return Observables(
        photon_number=state.n_p,
        two_photon=two_photon_expectation(state),
        g2_zero=g2,
        output_rate=output_rate(state, params),
    )
