"""Closed-form quasienergies, Dirac energies, spinor eigenstates, polarization.

Level index convention: a single index n >= 0 is shared by the optical and
the Dirac pictures.  The JC quasienergy ~ sqrt(n + 1) and the Landau energy
~ sqrt(2n + 2) both use this n, so Landau level n here is the optical level n
(the zero-energy state sits one step below, outside the family).

Position-space states are eigenfunctions of the two-component operator

    H_minus = E x + sx p + sy (B x - k2) - sz k3,      p = -i d/dx,

and H_plus = E x - sx p - sy (B x - k2) + sz k3 for the partner spinor.  The
upper component is the excited level of the two-level system, so with
``P = 2 conj(lower) upper / norm`` the driven-JC zero mode has P = i 2 eps/lam.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .model import (
    FieldConfig,
    ModelParams,
    Regime,
    RegimeError,
    classify_fields,
    classify_regime,
    drive_ratio,
)
from .special import hermite_psi, pcf_d_on_ray

__all__ = [
    "LorentzFactors",
    "lorentz_factors",
    "quasienergy_jc",
    "quasienergy_rabi",
    "dirac_energy_discrete",
    "dirac_energy_privileged",
    "magnetic_frame",
    "dirac_energy_boosted",
    "DiracSpinorState",
    "SampledState",
    "spinor_discrete",
    "zero_mode_discrete",
    "spinor_continuous",
    "reversed_field_partner",
    "dirac_residual",
    "Polarization",
    "polarization",
    "polarization_branches",
    "polarization_from_samples",
    "polarization_from_fock",
]


def _sign(sign):
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def _level(n):
    if int(n) != n or n < 0:
        raise ValueError(f"level must be a nonnegative integer, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class LorentzFactors:
    beta: float
    xi_plus: float
    xi_minus: float


def lorentz_factors(beta):
    """Spinor boost weights Xi_pm = sqrt(1 +- sqrt(1 - beta^2))."""
    if abs(beta) > 1:
        raise ValueError(f"|beta| must be <= 1, got {beta!r}")
    k = math.sqrt((1.0 - beta) * (1.0 + beta))
    # 1 - k = beta^2 / (1 + k) avoids cancellation at small beta
    return LorentzFactors(float(beta), math.sqrt(1.0 + k), abs(beta) / math.sqrt(1.0 + k))


def quasienergy_jc(n, sign, params: ModelParams):
    """sign * lam (1 - 4 eps^2/lam^2)^(3/4) sqrt(n + 1) for the bare model."""
    if params.eta != 0.0:
        raise ValueError("quasienergy_jc takes eta = 0; use quasienergy_rabi")
    return _quasienergy(n, sign, params)


def quasienergy_rabi(n, sign, params: ModelParams):
    """Quasienergy of the counter-rotating model.

    The squeeze map makes it isospectral with the bare model at drive eps,
    so the collapse factor uses the ratio 2 eps' / (lam' (1 + eta)).
    """
    return _quasienergy(n, sign, params)


def _quasienergy(n, sign, params):
    n = _level(n)
    s = _sign(sign)
    if classify_regime(params) is not Regime.DISCRETE:
        raise RegimeError("discrete quasienergies exist only below critical drive")
    r = drive_ratio(params)
    return s * params.lam * ((1.0 - r) * (1.0 + r)) ** 0.75 * math.sqrt(n + 1)


def _discrete_beta(fields):
    if classify_fields(fields) is not Regime.DISCRETE:
        raise RegimeError("discrete Dirac levels need B > E")
    return fields.E / fields.B


def dirac_energy_discrete(n, sign, fields: FieldConfig):
    """Lab-frame Landau energy in crossed fields with B > E.

    beta k2 +- sqrt((1-beta^2)^(3/2) (2n+2) B + (1-beta^2) k3^2); the
    (1 - beta^2) on k3^2 is what the boost from the magnetic frame gives.
    """
    n = _level(n)
    s = _sign(sign)
    b = _discrete_beta(fields)
    k2 = (1.0 - b) * (1.0 + b)
    root = math.sqrt(k2 ** 1.5 * (2 * n + 2) * fields.B + k2 * fields.k3 ** 2)
    return b * fields.k2 + s * root


def dirac_energy_privileged(n, sign, fields: FieldConfig):
    """Landau energy +- sqrt(2(n+1) B + k3^2) in a frame with no electric field."""
    if fields.E != 0.0:
        raise ValueError("privileged-frame energy needs E = 0")
    n = _level(n)
    return _sign(sign) * math.sqrt((2 * n + 2) * fields.B + fields.k3 ** 2)


def magnetic_frame(fields: FieldConfig, energy):
    """Boost with velocity E/B; returns (boosted fields, boosted energy)."""
    b = _discrete_beta(fields)
    g = 1.0 / math.sqrt((1.0 - b) * (1.0 + b))
    primed = FieldConfig(0.0, fields.B / g, g * (fields.k2 - b * energy), fields.k3)
    return primed, g * (energy - b * fields.k2)


def dirac_energy_boosted(n, sign, fields: FieldConfig):
    """Lab energy obtained by boosting the privileged-frame energy back.

    The privileged energy does not depend on k2', so the inverse boost
    omega = gamma (omega' + beta k2'), k2 = gamma (k2' + beta omega') can be
    solved for omega given the lab k2.
    """
    b = _discrete_beta(fields)
    g = 1.0 / math.sqrt((1.0 - b) * (1.0 + b))
    primed = FieldConfig(0.0, fields.B / g, 0.0, fields.k3)
    w_p = dirac_energy_privileged(n, sign, primed)
    k2_p = fields.k2 / g - b * w_p
    return g * (w_p + b * k2_p)


@dataclass(frozen=True)
class DiracSpinorState:
    """Two-component eigenfunction of H_minus (branch 'minus') or H_plus.

    ``evaluate(x)`` returns (upper, lower) arrays including ``scale``.
    """

    regime: Regime
    branch: str
    energy: float
    fields: FieldConfig
    n: int | None
    evaluator: Callable = field(repr=False, compare=False)
    scale: complex = 1.0

    @property
    def k2(self):
        return self.fields.k2

    @property
    def k3(self):
        return self.fields.k3

    def evaluate(self, x):
        up, dn = self.evaluator(np.asarray(x, dtype=float))
        return self.scale * up, self.scale * dn

    def with_scale(self, scale):
        return DiracSpinorState(self.regime, self.branch, self.energy, self.fields,
                                self.n, self.evaluator, scale)


@dataclass(frozen=True)
class SampledState:
    """Spinor samples on a 1-D grid; normalization is 'L2' or 'delta'."""

    grid: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    normalization: str
    state: DiracSpinorState

    @property
    def energy(self):
        return self.state.energy

    def norm(self):
        dens = np.abs(self.upper) ** 2 + np.abs(self.lower) ** 2
        return float(np.trapezoid(dens, self.grid))


def _boost_spinor(xp, xm, up, dn):
    # (Xi_+ 1 - Xi_- sigma_y) applied to (up, dn)
    return xp * up + 1j * xm * dn, xp * dn - 1j * xm * up


def _minus_discrete(n, s, fields):
    b = fields.E / fields.B
    lf = lorentz_factors(b)
    kap = math.sqrt((1.0 - b) * (1.0 + b))
    g = 1.0 / kap
    w = dirac_energy_discrete(n, s, fields)
    b_p = fields.B * kap
    w_p = g * (w - b * fields.k2)
    k2_p = g * (fields.k2 - b * w)
    l_p = b_p ** -0.5
    # relative weight c' = +-sqrt((w'+k3)/(w'-k3)), written in a form that
    # stays finite at k3 = 0 since (w'+k3)(w'-k3) = 2 B' (n+1)
    c = (w_p + fields.k3) / math.sqrt(2.0 * b_p * (n + 1))

    def ev(x):
        # displaced variable: the shift -l' k2' carries the sign of the branch
        y = x / l_p - l_p * k2_p
        up = hermite_psi(n, y).astype(complex)
        dn = 1j * c * hermite_psi(n + 1, y)
        return _boost_spinor(lf.xi_plus, lf.xi_minus, up, dn)

    return w, ev


def _plus_from_minus(ev_minus):
    # sz P H_plus P sz = -H_minus(k2 -> -k2): phi_plus(x) = sz phi_minus(-x)
    def ev(x):
        up, dn = ev_minus(-x)
        return up, -dn

    return ev


def _check_branch(branch):
    if branch not in ("plus", "minus"):
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")


def _l2_sample(state, grid):
    grid = np.asarray(grid, dtype=float)
    up, dn = state.evaluate(grid)
    nrm = np.trapezoid(np.abs(up) ** 2 + np.abs(dn) ** 2, grid)
    if not nrm > 0:
        raise ValueError("state vanishes on the grid")
    scale = 1.0 / math.sqrt(nrm)
    st = state.with_scale(scale)
    return SampledState(grid, up * scale, dn * scale, "L2", st)


def spinor_discrete(n, branch, sign, fields: FieldConfig, grid):
    """Landau-level spinor in crossed fields (B > E), L2-normalized on ``grid``.

    Built in the frame without electric field from oscillator functions of
    the displaced variable y = x/l' - l' k2' and boosted back with the Xi
    weights.  Branch 'minus' at k2 = k3 = 0 is the driven-JC eigenstate.
    """
    _check_branch(branch)
    n = _level(n)
    s = _sign(sign)
    _discrete_beta(fields)
    if branch == "minus":
        w, ev = _minus_discrete(n, s, fields)
    else:
        mirrored = fields.with_k(-fields.k2, fields.k3)
        w_m, ev_m = _minus_discrete(n, -s, mirrored)
        w, ev = -w_m, _plus_from_minus(ev_m)
    state = DiracSpinorState(Regime.DISCRETE, branch, w, fields, n, ev)
    return _l2_sample(state, grid)


def zero_mode_discrete(fields: FieldConfig, grid):
    """Zero-energy state below critical: Gaussian times (Xi_-, -i Xi_+).

    Needs k2 = k3 = 0.  Constructed directly rather than as a member of the
    Landau family.
    """
    if fields.k2 != 0 or fields.k3 != 0:
        raise ValueError("the zero mode exists for k2 = k3 = 0")
    b = _discrete_beta(fields)
    lf = lorentz_factors(b)
    width = fields.B * math.sqrt((1.0 - b) * (1.0 + b))

    def ev(x):
        gauss = np.exp(-0.5 * width * x * x)
        return lf.xi_minus * gauss + 0j, -1j * lf.xi_plus * gauss

    state = DiracSpinorState(Regime.DISCRETE, "minus", 0.0, fields, None, ev)
    return _l2_sample(state, grid)


def _minus_continuous(energy, fields):
    b = fields.B / fields.E
    lf = lorentz_factors(b)
    kap = math.sqrt((1.0 - b) * (1.0 + b))
    g = 1.0 / kap
    l_p = (fields.E * kap) ** -0.5
    w_p = g * (energy - b * fields.k2)
    k2_p = g * (fields.k2 - b * energy)
    a = -0.5j * l_p ** 2 * (k2_p ** 2 + fields.k3 ** 2)
    weight = l_p * cmath.exp(0.25j * math.pi) * (fields.k3 - 1j * k2_p) / math.sqrt(2.0)

    def ev(x):
        s = w_p * l_p - x / l_p
        d0 = pcf_d_on_ray(-a, s)
        if weight != 0:
            d1 = weight * pcf_d_on_ray(-a - 1.0, s)
        else:
            d1 = 0.0
        return _boost_spinor(lf.xi_plus, lf.xi_minus, d0 - d1, d0 + d1)

    return ev


def spinor_continuous(branch, energy, fields: FieldConfig, grid):
    """Scattering spinor above critical (E > B) at real ``energy``.

    Built in the frame without magnetic field from D_{-a} and D_{-a-1} on the
    e^{i pi/4} ray and boosted back with Xi weights.  Normalized to unit
    modulus of the upper component at x = 0 (delta-normalizable family).
    """
    _check_branch(branch)
    if classify_fields(fields) is not Regime.CONTINUOUS:
        raise RegimeError("continuous states need E > B")
    energy = float(energy)
    if branch == "minus":
        ev = _minus_continuous(energy, fields)
    else:
        ev = _plus_from_minus(_minus_continuous(-energy, fields.with_k(-fields.k2, fields.k3)))
    state = DiracSpinorState(Regime.CONTINUOUS, branch, energy, fields, None, ev)
    u0, d0 = state.evaluate(np.zeros(1))
    ref = u0[0] if abs(u0[0]) > 0 else d0[0]
    state = state.with_scale(1.0 / abs(ref))
    grid = np.asarray(grid, dtype=float)
    up, dn = state.evaluate(grid)
    return SampledState(grid, up, dn, "delta", state)


def reversed_field_partner(sample: SampledState):
    """Second solution of the same operator, sz conj(phi).

    H_minus commutes with the antiunitary sz K, so this is again an
    eigenstate at the same energy; above critical it is the branch the plus
    spinor supplies under E -> -E (real part of the polarization flipped).
    """
    st = sample.state

    def ev(x):
        up, dn = st.evaluator(x)
        return np.conj(up), -np.conj(dn)

    new = DiracSpinorState(st.regime, st.branch, st.energy, st.fields, st.n, ev,
                           np.conj(st.scale))
    return SampledState(sample.grid, np.conj(sample.upper), -np.conj(sample.lower),
                        sample.normalization, new)


def dirac_residual(state: DiracSpinorState, x, h=1e-3):
    """max |(H - energy) phi| / max |phi| on ``x`` by five-point differences."""
    x = np.asarray(x, dtype=float)
    up, dn = state.evaluate(x)
    d_up = np.zeros_like(up)
    d_dn = np.zeros_like(dn)
    for c, off in ((8, 1), (-8, -1), (-1, 2), (1, -2)):
        u, d = state.evaluate(x + off * h)
        d_up += c * u
        d_dn += c * d
    d_up /= 12 * h
    d_dn /= 12 * h
    f = state.fields
    sgn = 1.0 if state.branch == "minus" else -1.0
    pu, pd = -1j * d_up, -1j * d_dn
    m = f.B * x - f.k2
    # sx p + sy m - sz k3, all multiplied by sgn for the plus operator
    hu = f.E * x * up + sgn * (pd - 1j * m * dn - f.k3 * up)
    hd = f.E * x * dn + sgn * (pu + 1j * m * up + f.k3 * dn)
    r = np.maximum(np.abs(hu - state.energy * up), np.abs(hd - state.energy * dn))
    return float(np.max(r) / np.max(np.maximum(np.abs(up), np.abs(dn))))


@dataclass(frozen=True)
class Polarization:
    """Two-level coherence P (= twice <sigma_->) and its Bloch vector.

    ``bloch_vector = (Re P, Im P, z)`` with z the population inversion, so
    the vector has unit length for the zero-quasienergy states.
    """

    sigma_minus_expectation: complex
    bloch_vector: tuple


def polarization_branches(params: ModelParams):
    """Analytic polarization of the zero-quasienergy states.

    One state below critical (P = i r with r = 2 eps/lam after squeeze
    reduction, south hemisphere); two above, on the equator, at
    P = +-sqrt(1 - 1/r^2) + i/r.
    """
    regime = classify_regime(params)
    if regime is Regime.CRITICAL:
        raise RegimeError("polarization branches merge at the critical drive")
    r = drive_ratio(params)
    if regime is Regime.DISCRETE:
        z = -math.sqrt((1.0 - r) * (1.0 + r))
        return (Polarization(1j * r, (0.0, r, z)),)
    be = 1.0 / r
    re = math.sqrt((1.0 - be) * (1.0 + be))
    return (
        Polarization(complex(re, be), (re, be, 0.0)),
        Polarization(complex(-re, be), (-re, be, 0.0)),
    )


def polarization(params: ModelParams):
    """Polarization of the zero-quasienergy state (the minus-spinor branch)."""
    return polarization_branches(params)[0]


def polarization_from_samples(sample: SampledState):
    """P and Bloch vector of a sampled spinor by grid quadrature."""
    x = sample.grid
    up, dn = sample.upper, sample.lower
    nrm = np.trapezoid(np.abs(up) ** 2 + np.abs(dn) ** 2, x)
    p = 2.0 * np.trapezoid(np.conj(dn) * up, x) / nrm
    z = np.trapezoid(np.abs(up) ** 2 - np.abs(dn) ** 2, x) / nrm
    return Polarization(complex(p), (p.real, p.imag, float(z)))


def polarization_from_fock(vec):
    """P and Bloch vector of an interleaved Fock (x) spin vector."""
    vec = np.asarray(vec)
    g, e = vec[0::2], vec[1::2]
    nrm = np.vdot(vec, vec).real
    p = 2.0 * np.vdot(e, g) / nrm
    z = (np.vdot(e, e).real - np.vdot(g, g).real) / nrm
    return Polarization(complex(p), (p.real, p.imag, float(z)))
