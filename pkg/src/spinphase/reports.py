"""Structured results shared by the classical and quantum phase routes."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class PhaseReport:
    """Geometric phase split into the noiseless part and its correction.

    phi_classical is the phase of the unperturbed circular precession,
    -pi*(1 - cos(theta0)); phi_correction collects everything beyond it.
    breakdown itemizes the correction (keys depend on the route:
    'first'/'second' for the classical perturbative phase,
    'fluctuation'/'commutator' for the quantum one).  p_minus is the
    occupation of the anti-aligned spin branch when one is defined.
    """

    phi_classical: float
    phi_correction: float
    method: str
    breakdown: dict = field(default_factory=dict)
    p_minus: float | None = None

    @property
    def phi_total(self) -> float:
        return self.phi_classical + self.phi_correction

    def to_dict(self) -> dict:
        out = {
            "phi_classical": self.phi_classical,
            "phi_correction": self.phi_correction,
            "phi_total": self.phi_total,
            "method": self.method,
            "breakdown": dict(self.breakdown),
        }
        if self.p_minus is not None:
            out["p_minus"] = self.p_minus
        return out
