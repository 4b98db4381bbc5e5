# /strongconverse/models.py
# Registros de resultados y de configuración que circulan entre módulos.

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import pandas as pd

COMMANDS = ("divergence", "capacity", "exponent", "eb-check", "simulate", "verify")
FORMATS = ("json", "csv")


@dataclass
class CapacityResult:
    """Valor de un supremo/ínfimo junto con su testigo y una cota del error."""
    value: float
    optimizer_witness: Any
    iterations: int
    gap_estimate: float
    converged: bool = True
    lower_bound: Optional[float] = None
    details: dict = field(default_factory=dict)

    @property
    def upper_bound(self):
        return self.value + max(self.gap_estimate, 0.0)


@dataclass
class NormEstimate:
    """Estimación de ν_α: cota inferior certificada y mejor entrada encontrada."""
    value: float
    best_input: np.ndarray
    restarts: int
    grid_value: Optional[float] = None


@dataclass
class InequalityCheck:
    holds: bool
    lhs: float
    rhs: float
    details: dict = field(default_factory=dict)

    @property
    def margin(self):
        return self.rhs - self.lhs

    def __bool__(self):
        return self.holds


@dataclass
class ExponentCurve:
    alphas: list
    chi_alpha: list
    rate: float
    exponent: float
    gap_estimates: list = field(default_factory=list)
    best_alpha: Optional[float] = None
    monotone: bool = True

    @property
    def terms(self):
        return [(a - 1.0) / a * (self.rate - c) for a, c in zip(self.alphas, self.chi_alpha)]

    def bound(self, n):
        """Cota 2^{−n·E(R)} a la probabilidad de éxito tras n usos."""
        return float(2.0 ** (-n * self.exponent))

    def to_frame(self):
        return pd.DataFrame({"alpha": self.alphas, "chi_alpha": self.chi_alpha, "term": self.terms})


@dataclass
class AdditivityReport:
    chi: float
    chi_tensor_lower: float
    eb_verdict: str
    lower_ok: bool
    gap_ok: bool

    @property
    def gap(self):
        return self.chi_tensor_lower - 2.0 * self.chi

    @property
    def passed(self):
        return self.lower_ok and self.gap_ok


@dataclass
class SimulationReport:
    p_succ: float
    rate: float
    bound: float
    exponent: float
    decoder: str
    separability_checks: list = field(default_factory=list)
    mi_chain: list = field(default_factory=list)
    bound_ok: bool = True
    separability_ok: bool = True
    chain_ok: bool = True

    @property
    def margin(self):
        return self.bound - self.p_succ

    @property
    def passed(self):
        return self.bound_ok and self.separability_ok and self.chain_ok


@dataclass(frozen=True)
class RunConfig:
    command: str
    channel: Optional[str] = None
    alpha: Optional[float] = None
    rate: Optional[float] = None
    grid: Optional[tuple] = None
    seed: int = 42
    budget: int = 20
    out: Optional[str] = None
    format: str = "json"
    suite: Optional[str] = None
    rho: Optional[str] = None
    sigma: Optional[str] = None
    rounds: int = 1
    messages: int = 2
    cases: Optional[int] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"Comando desconocido: {self.command}")
        if self.seed < 0 or self.budget <= 0:
            raise ValueError("seed debe ser no negativa y budget positivo")
        if self.rounds < 1 or self.messages < 2 or (self.cases is not None and self.cases < 1):
            raise ValueError("rounds ≥ 1, messages ≥ 2 y cases ≥ 1")
        if self.format not in FORMATS:
            raise ValueError(f"Formato no soportado: {self.format}")

    def echo(self):
        """Configuración serializable que se copia en cada reporte."""
        return {
            "command": self.command, "channel": self.channel, "alpha": self.alpha,
            "rate": self.rate, "grid": list(self.grid) if self.grid else None,
            "seed": self.seed, "budget": self.budget, "format": self.format,
            "suite": self.suite, "rho": self.rho, "sigma": self.sigma,
            "rounds": self.rounds, "messages": self.messages, "cases": self.cases,
        }


@dataclass
class SeparabilityCheck:
    """Veredicto PPT de un estado condicional de la trayectoria en el corte Alice:Bob."""
    round_index: int
    stage: str
    message: int
    min_eigenvalue: float
    is_ppt: bool


@dataclass
class ChainReport:
    """Cadena de informaciones mutuas del converso débil, ronda a ronda."""
    chi: float
    rounds: list = field(default_factory=list)
    cumulative: float = 0.0
    cumulative_ok: bool = True
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return self.cumulative_ok and not self.failures
