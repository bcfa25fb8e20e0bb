"""Physical constants (SI, exact 2019 definitions)."""
from dataclasses import dataclass
import math


@dataclass(frozen=True)
class PhysicalConstants:
    electron_charge: float = 1.602176634e-19
    planck_h: float = 6.62607015e-34

    @property
    def reduced_planck(self) -> float:
        return self.planck_h / (2 * math.pi)

    @property
    def reduced_flux_quantum(self) -> float:
        return self.reduced_planck / (2 * self.electron_charge)


CODATA = PhysicalConstants()
