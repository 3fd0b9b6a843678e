"""Parameter algebra for the driven Jaynes-Cummings(-Rabi) model.

Everything here is scalar arithmetic: couplings, critical drives, the squeeze
parameter that maps the counter-rotating model onto the rotating one, and the
dictionary between optical parameters and crossed electromagnetic fields.
Units are hbar = c = e = 1 throughout.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "CRITICAL_TOL",
    "ModelParams",
    "FieldConfig",
    "Regime",
    "RegimeError",
    "critical_drive",
    "displaced_critical_drive",
    "squeeze_parameter",
    "drive_ratio",
    "classify_regime",
    "classify_fields",
    "optics_to_fields",
    "fields_to_optics",
    "invariant_length",
]

CRITICAL_TOL = 1e-12


class RegimeError(ValueError):
    """Raised when a formula is evaluated outside the regime it holds in."""


class Regime(enum.Enum):
    DISCRETE = "discrete"
    CRITICAL = "critical"
    CONTINUOUS = "continuous"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the driven JC(-Rabi) Hamiltonian.

    Parameters
    ----------
    lam : float
        Rotating coupling of the bare model, > 0.
    eps : float
        Drive amplitude of the bare (eta = 0) model, >= 0.
    eta : float
        Weight of the counter-rotating coupling, in [0, 1].

    Notes
    -----
    ``lam_prime`` and ``eps_prime`` are the coupling and drive that appear in
    the counter-rotating Hamiltonian.  They are always derived from
    ``(lam, eps, eta)``; use :meth:`from_scaled` when the drive of the
    counter-rotating Hamiltonian is the natural input.
    """

    lam: float
    eps: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        for name in ("lam", "eps", "eta"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.lam <= 0:
            raise ValueError(f"lam must be > 0, got {self.lam!r}")
        if self.eps < 0:
            raise ValueError(f"eps must be >= 0, got {self.eps!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta!r}")

    @classmethod
    def from_scaled(cls, lam, eps_prime, eta=0.0):
        """Build parameters from the drive of the counter-rotating Hamiltonian."""
        if eta >= 1.0:
            raise ValueError("the scaled drive is undefined at eta = 1")
        scale = (1.0 + eta) / math.sqrt((1.0 - eta) * (1.0 + eta))
        return cls(lam, eps_prime / scale, eta)

    @property
    def lam_prime(self):
        if self.eta == 1.0:
            return math.inf
        return self.lam / math.sqrt((1.0 - self.eta) * (1.0 + self.eta))

    @property
    def eps_prime(self):
        if self.eta == 1.0:
            return math.inf if self.eps > 0 else 0.0
        return self.eps * (self.lam_prime / self.lam) * (1.0 + self.eta)

    def with_eps(self, eps):
        return ModelParams(self.lam, eps, self.eta)


def displaced_critical_drive(lam_prime, eta):
    """Critical drive lam_prime * (1 + eta) / 2 of the counter-rotating model."""
    return 0.5 * lam_prime * (1.0 + eta)


def critical_drive(params: ModelParams):
    """Critical value of the drive entering the Hamiltonian being diagonalized.

    At eta = 0 this is ``lam / 2``; otherwise it is the displaced value in
    terms of the scaled coupling, i.e. the threshold for ``eps_prime``.
    """
    if params.eta == 0.0:
        return 0.5 * params.lam
    return displaced_critical_drive(params.lam_prime, params.eta)


def squeeze_parameter(params: ModelParams):
    """Squeeze parameter z with cosh z = lam'/lam and sinh z = eta lam'/lam."""
    if params.eta >= 1.0:
        raise ValueError("squeeze parameter diverges at eta = 1")
    # e^z = (1 + eta) lam'/lam = sqrt((1 + eta) / (1 - eta))
    return 0.5 * math.log1p(2.0 * params.eta / (1.0 - params.eta))


def drive_ratio(params: ModelParams):
    """Drive over critical drive, 2 eps' / (lam' (1 + eta)).

    The squeeze map leaves this ratio equal to 2 eps / lam, which is what is
    returned at eta = 1 where the scaled quantities diverge.
    """
    if params.eta == 1.0 or params.eta == 0.0:
        return 2.0 * params.eps / params.lam
    return params.eps_prime / displaced_critical_drive(params.lam_prime, params.eta)


def _classify(ratio, tol):
    if abs(ratio - 1.0) <= tol:
        return Regime.CRITICAL
    return Regime.DISCRETE if ratio < 1.0 else Regime.CONTINUOUS


def classify_regime(params: ModelParams, tol=CRITICAL_TOL):
    return _classify(drive_ratio(params), tol)


@dataclass(frozen=True)
class FieldConfig:
    """Crossed fields E (along x) and B, plus the conserved wavenumbers."""

    E: float
    B: float
    k2: float = 0.0
    k3: float = 0.0

    def __post_init__(self):
        for name in ("E", "B", "k2", "k3"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.E < 0 or self.B < 0:
            raise ValueError("field magnitudes must be >= 0")
        if self.E == 0 and self.B == 0:
            raise ValueError("E and B cannot both vanish")

    @property
    def beta_B(self):
        if self.B <= 0:
            raise RegimeError("beta_B needs B > 0")
        return self.E / self.B

    @property
    def beta_E(self):
        if self.E <= 0:
            raise RegimeError("beta_E needs E > 0")
        return self.B / self.E

    @property
    def l_B(self):
        if self.B <= 0:
            raise RegimeError("magnetic length needs B > 0")
        return 1.0 / math.sqrt(self.B)

    @property
    def l_E(self):
        if self.E <= 0:
            raise RegimeError("electric length needs E > 0")
        return 1.0 / math.sqrt(self.E)

    def with_k(self, k2, k3):
        return FieldConfig(self.E, self.B, k2, k3)


def classify_fields(fields: FieldConfig, tol=CRITICAL_TOL):
    if fields.B == 0:
        return Regime.CONTINUOUS
    return _classify(fields.E / fields.B, tol)


def optics_to_fields(params: ModelParams):
    """Crossed fields equivalent to the bare driven JC model.

    lam = sqrt(2) B l_B and eps = E l_B / sqrt(2), so B = lam^2 / 2 and
    E = lam eps.  The ratio E / B equals 2 eps / lam.
    """
    if params.eta != 0.0:
        raise ValueError(
            "field dictionary needs eta = 0; reduce with the squeeze map first "
            "(ModelParams(lam, eps) carries the equivalent bare model)"
        )
    if params.eps == 0.0:
        return FieldConfig(0.0, 0.5 * params.lam ** 2)
    return FieldConfig(params.lam * params.eps, 0.5 * params.lam ** 2)


def fields_to_optics(fields: FieldConfig):
    """Inverse of :func:`optics_to_fields` (needs B > 0 and k2 = k3 = 0)."""
    if fields.B <= 0:
        raise RegimeError("optical couplings need B > 0")
    if fields.k2 != 0 or fields.k3 != 0:
        raise ValueError("nonzero wavenumbers have no counterpart in ModelParams")
    lam = math.sqrt(2.0 * fields.B)
    return ModelParams(lam, fields.E / lam)


def invariant_length(fields: FieldConfig, tol=CRITICAL_TOL):
    """Invariant length (B^2 - E^2)^(-1/4) together with the regime.

    Returns
    -------
    length : float or complex
        Real for B > E, ``inf`` at B = E, complex (principal root) for E > B.
    regime : Regime
    """
    regime = classify_fields(fields, tol)
    if regime is Regime.CRITICAL:
        return math.inf, regime
    d = (fields.B - fields.E) * (fields.B + fields.E)
    if regime is Regime.DISCRETE:
        return d ** -0.25, regime
    return complex(d) ** -0.25, regime
