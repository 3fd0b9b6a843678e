"""Numerical experiments behind the command-line front end.

Each ``cmd_*`` function takes a :class:`RunConfig` and returns plain data
(a :class:`Table`, a :class:`CollapseReport` or a verification dict); the
CLI only parses configuration and serializes results.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np
from scipy import stats

from . import analytic, special
from .eigen import converged_spectrum, edge_weights, eig_operator, nearest_zero
from .fock import BasisSpec, build_h0, build_h_eta, verify_squeeze_identity
from .model import (
    FieldConfig,
    ModelParams,
    Regime,
    classify_fields,
    classify_regime,
    critical_drive,
    optics_to_fields,
)

__all__ = [
    "ConfigError",
    "ConvergenceCapError",
    "RunConfig",
    "COMMANDS",
    "parse_config_text",
    "load_config",
    "Table",
    "CollapseReport",
    "cmd_spectrum",
    "cmd_collapse_fit",
    "cmd_polarization",
    "cmd_verify",
    "cmd_dirac",
    "grid_params",
]

COMMANDS = ("spectrum", "collapse-fit", "polarization", "verify", "dirac")
GAP_FLOOR = 1e-8
# eigenvectors with more weight than this near the Fock cutoff are artifacts
EDGE_TOL = 1e-6


class ConfigError(ValueError):
    pass


class ConvergenceCapError(RuntimeError):
    pass


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _opt_int(text):
    t = str(text).strip().lower()
    return None if t in ("", "auto", "none") else int(t)


def _choice(*options):
    def parse(text):
        t = str(text).strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {t!r}")
        return t

    return parse


@dataclass
class RunConfig:
    """Flat run configuration; keys match config-file and flag names."""

    command: str = "spectrum"
    lam: float = 1.0
    eta: float | None = None
    eps: float | None = None
    eps_start: float = 0.0
    eps_stop: float | None = None
    eps_count: int | None = None
    drive_frame: str = "scaled"
    k: int = 8
    tol: float = 1e-8
    n_max: int | None = None
    n_start: int = 64
    n_cap: int = 4096
    threads: int | None = None
    exclude_critical: float = 0.02
    require_converged: bool = False
    E: float = 0.0
    B: float = 1.0
    k2: float = 0.0
    k3: float = 0.0
    levels: int = 4
    require: str = "any"
    interior: float = 0.25
    verify_n_max: int = 256
    flip_squeeze_sign: bool = False
    draws: int = 200
    seed: int = 0
    out: str | None = None
    format: str = "csv"


# config key -> (attribute, parser)
KEYS = {
    "lambda": ("lam", float),
    "eta": ("eta", float),
    "eps": ("eps", float),
    "eps_start": ("eps_start", float),
    "eps_stop": ("eps_stop", float),
    "eps_count": ("eps_count", int),
    "drive_frame": ("drive_frame", _choice("scaled", "bare")),
    "k": ("k", int),
    "tol": ("tol", float),
    "n_max": ("n_max", _opt_int),
    "n_start": ("n_start", int),
    "n_cap": ("n_cap", int),
    "threads": ("threads", _opt_int),
    "exclude_critical": ("exclude_critical", float),
    "require_converged": ("require_converged", _bool),
    "E": ("E", float),
    "B": ("B", float),
    "k2": ("k2", float),
    "k3": ("k3", float),
    "levels": ("levels", int),
    "require": ("require", _choice("any", "discrete", "continuous")),
    "interior": ("interior", float),
    "verify_n_max": ("verify_n_max", int),
    "flip_squeeze_sign": ("flip_squeeze_sign", _bool),
    "draws": ("draws", int),
    "seed": ("seed", int),
    "out": ("out", str),
    "format": ("format", _choice("csv", "json")),
}
BOOL_KEYS = ("require_converged", "flip_squeeze_sign")

# per-command defaults for keys left unset
_DEFAULTS = {
    "spectrum": {"eta": 0.0, "eps_stop": 0.49, "eps_count": 50},
    "collapse-fit": {"eta": 0.0, "eps_stop": 0.45, "eps_count": 10},
    "polarization": {"eta": 0.0, "eps_stop": 1.0, "eps_count": 21},
    "verify": {"eta": 0.5, "eps": 0.1},
    "dirac": {"eta": 0.0},
}


def parse_config_text(text, source="<config>"):
    """Parse ``key = value`` lines with ``#`` comments into a dict of strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = (value, f"{source}:{lineno}")
    return out


def load_config(command, path=None, overrides=None):
    """Build a validated RunConfig from an optional file plus flag overrides."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    entries = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from exc
        entries.update(parse_config_text(text, str(path)))
    for key, value in (overrides or {}).items():
        if key not in KEYS:
            raise ConfigError(f"--{key}: unknown option")
        entries[key] = (value, f"--{key}")
    cfg = RunConfig(command=command)
    for key, (value, where) in entries.items():
        attr, parse = KEYS[key]
        try:
            setattr(cfg, attr, parse(value))
        except ValueError as exc:
            raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from exc
    for attr, value in _DEFAULTS[command].items():
        if getattr(cfg, attr) is None:
            setattr(cfg, attr, value)
    _validate(cfg)
    return cfg


def _validate(cfg):
    def need(cond, msg):
        if not cond:
            raise ConfigError(msg)

    need(cfg.lam > 0, "lambda must be > 0")
    need(cfg.eta is None or 0.0 <= cfg.eta <= 1.0, "eta must lie in [0, 1]")
    need(cfg.tol > 0, "tol must be positive")
    need(cfg.k >= 1, "k must be >= 1")
    need(1 <= cfg.n_start <= cfg.n_cap, "need 1 <= n_start <= n_cap")
    need(cfg.n_max is None or cfg.n_max >= 1, "n_max must be >= 1")
    need(cfg.threads is None or cfg.threads >= 1, "threads must be >= 1")
    need(0 <= cfg.exclude_critical < 1, "exclude_critical must lie in [0, 1)")
    need(cfg.eps is None or cfg.eps >= 0, "eps must be >= 0")
    if cfg.command in ("spectrum", "collapse-fit", "polarization"):
        need(cfg.eta < 1.0, "eta must be < 1 for matrix computations")
        if cfg.eps is None:
            need(cfg.eps_count >= 2, "eps_count must be >= 2")
            need(0 <= cfg.eps_start < cfg.eps_stop, "need 0 <= eps_start < eps_stop")
    if cfg.command == "verify":
        need(cfg.eta < 1.0, "eta must be < 1 for the squeeze check")
        need(0 < cfg.interior <= 1, "interior must lie in (0, 1]")
        need(cfg.verify_n_max >= 4, "verify_n_max must be >= 4")
        need(cfg.draws >= 1, "draws must be >= 1")
    if cfg.command == "dirac":
        need(cfg.E >= 0 and cfg.B >= 0 and (cfg.E > 0 or cfg.B > 0),
             "fields need E, B >= 0, not both zero")
        need(cfg.levels >= 1, "levels must be >= 1")


def worker_count(cfg):
    env = os.environ.get("QUASICOLLAPSE_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"QUASICOLLAPSE_THREADS: not an integer: {env!r}") from None
        if n < 1:
            raise ConfigError("QUASICOLLAPSE_THREADS must be >= 1")
        return n
    return cfg.threads or os.cpu_count() or 1


def _pmap(cfg, fn, items):
    items = list(items)
    n = min(worker_count(cfg), max(1, len(items)))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def eps_grid(cfg):
    if cfg.eps is not None:
        return np.array([cfg.eps])
    return np.linspace(cfg.eps_start, cfg.eps_stop, cfg.eps_count)


def grid_params(cfg, eps):
    """Model parameters for a grid value in the configured drive frame.

    In the 'scaled' frame the grid value is the drive of the Hamiltonian
    being diagonalized (eps' for eta > 0); in the 'bare' frame it is the drive
    of the equivalent eta = 0 model.  At eta = 0 the two coincide.
    """
    eps = float(eps)
    if cfg.drive_frame == "scaled" and cfg.eta > 0:
        return ModelParams.from_scaled(cfg.lam, eps, cfg.eta)
    return ModelParams(cfg.lam, eps, cfg.eta)


def frame_critical(cfg):
    p = ModelParams(cfg.lam, 0.0, cfg.eta)
    if cfg.drive_frame == "scaled":
        return critical_drive(p)
    return 0.5 * cfg.lam


def _builder(params):
    if params.eta == 0.0:
        return lambda n: build_h0(params, BasisSpec(n))
    return lambda n: build_h_eta(params, BasisSpec(n))


def _converge(cfg, params, k):
    if cfg.n_max is not None:
        return converged_spectrum(_builder(params), k, cfg.tol, cfg.n_max, 2 * cfg.n_max,
                                  edge_tol=EDGE_TOL)
    return converged_spectrum(_builder(params), k, cfg.tol, cfg.n_start, cfg.n_cap,
                              edge_tol=EDGE_TOL)


def _point_converged(cert):
    # a hard cutoff always leaves one cutoff-bound zero mode; a second one
    # means the tracked states are not normalizable at this drive, even when
    # their values are pinned (k <= 2 tracks only the zero pair)
    if not cert.converged:
        return False
    if cert.edge_weights is None:
        return True
    return int(np.count_nonzero(cert.edge_weights >= EDGE_TOL)) <= 1


@dataclass
class Table:
    columns: tuple
    rows: list
    converged: bool = True

    def as_dict(self):
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}


def _drop_cutoff_mode(cert, k):
    """Indices into ``cert.levels`` of the k levels to report.

    The study tracks k + 1 levels; the spare slot absorbs the zero mode bound
    to the Fock cutoff, or the farthest level when no level is cutoff-bound.
    """
    keep = np.arange(len(cert.levels))
    w = cert.edge_weights
    if w is not None and np.any(w >= EDGE_TOL):
        keep = np.delete(keep, int(np.argmax(w)))
    sel = keep[nearest_zero(cert.levels[keep], k)]
    return np.sort(sel)


def cmd_spectrum(cfg: RunConfig):
    """k levels nearest zero for each grid drive, with trust flags.

    A level is flagged trusted only when the whole study converged, the
    level's own drift is below tolerance and its eigenvector stays clear of
    the Fock cutoff; above critical the study never converges, so every row
    there is untrusted.
    """
    grid = eps_grid(cfg)

    def point(e):
        _, cert = _converge(cfg, grid_params(cfg, e), cfg.k + 1)
        return e, cert

    rows = []
    all_ok = True
    for e, cert in _pmap(cfg, point, grid):
        conv = _point_converged(cert)
        all_ok &= conv
        for i, j in enumerate(_drop_cutoff_mode(cert, cfg.k)):
            ok = bool(cert.trusted[j]) and conv
            rows.append((float(e), i, float(cert.levels[j]), ok))
    return Table(("epsilon", "level_index", "quasienergy", "trusted_flag"), rows, all_ok)


@dataclass
class CollapseReport:
    epsilons: list
    gaps: list
    exponent: float
    exponent_stderr: float
    ci_low: float
    ci_high: float
    fit_residual: float
    detected_critical: float
    expected_critical: float
    grid_step: float
    excluded: list = field(default_factory=list)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def table(self):
        cols = ("epsilon", "gap", "exponent", "exponent_stderr", "ci_low", "ci_high",
                "fit_residual", "detected_critical", "expected_critical")
        summary = (self.exponent, self.exponent_stderr, self.ci_low, self.ci_high,
                   self.fit_residual, self.detected_critical, self.expected_critical)
        rows = [(e, g) + summary for e, g in zip(self.epsilons, self.gaps)]
        return Table(cols, rows)


def _lowest_gap(cert):
    if not _point_converged(cert):
        return None
    vals = cert.levels[cert.trusted]
    pos = vals[vals > GAP_FLOOR]
    return float(pos.min()) if pos.size else None


def cmd_collapse_fit(cfg: RunConfig):
    """Fit log gap against log(1 - (eps/eps_c)^2); the slope is the exponent.

    The critical drive is then re-estimated from the data by a straight-line
    fit of gap^(1/p) against eps^2.
    """
    grid = eps_grid(cfg)
    if len(grid) < 3:
        raise ConfigError("collapse fit needs at least 3 grid points")
    crit = frame_critical(cfg)
    keep = [e for e in grid if e < crit and abs(e - crit) >= cfg.exclude_critical * crit]
    excluded = [float(e) for e in grid if e not in keep]
    if len(keep) < 3:
        raise ConfigError("fewer than 3 grid points below the critical neighbourhood")
    k = max(cfg.k, 4)
    certs = _pmap(cfg, lambda e: _converge(cfg, grid_params(cfg, e), k)[1], keep)
    eps_ok, gaps = [], []
    for e, cert in zip(keep, certs):
        g = _lowest_gap(cert)
        if g is None:
            excluded.append(float(e))
            continue
        eps_ok.append(float(e))
        gaps.append(g)
    if len(gaps) < 3:
        raise ConvergenceCapError("fewer than 3 converged gaps to fit")
    e = np.array(eps_ok)
    x = np.log1p(-(e / crit) ** 2)
    y = np.log(np.array(gaps))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    dof = len(x) - 2
    rms = float(np.sqrt(np.mean(resid ** 2)))
    sxx = float(np.sum((x - x.mean()) ** 2))
    if dof > 0 and sxx > 0:
        stderr = float(np.sqrt(np.sum(resid ** 2) / dof / sxx))
        half = float(stats.t.ppf(0.975, dof)) * stderr
    else:
        stderr = half = float("nan")
    # gap^(1/p) is linear in eps^2 and vanishes at the critical drive
    c1, c0 = np.polyfit(e ** 2, np.array(gaps) ** (1.0 / slope), 1)
    detected = math.sqrt(-c0 / c1) if c1 < 0 < c0 else float("nan")
    step = float(grid[1] - grid[0])
    return CollapseReport(eps_ok, gaps, float(slope), stderr,
                          float(slope) - half, float(slope) + half, rms,
                          float(detected), float(crit), step, sorted(excluded))


def _numeric_polarization(params, n_max):
    op = _builder(params)(n_max)
    spec = eig_operator(op, want_vectors=True)
    idx = nearest_zero(spec.eigenvalues, 4)
    # the truncation edge carries its own spurious zero mode; keep the state
    # with the least weight near the cutoff
    weights, vecs = edge_weights(spec.eigenvalues[idx], spec.eigenvectors[:, idx])
    vec = vecs[:, int(np.argmin(weights))]
    return analytic.polarization_from_fock(vec).sigma_minus_expectation


def cmd_polarization(cfg: RunConfig):
    """Analytic zero-mode polarization across both regimes, numeric below.

    Grid points within one grid step of the critical drive are skipped.
    """
    grid = eps_grid(cfg)
    crit = frame_critical(cfg)
    step = float(grid[1] - grid[0]) if len(grid) > 1 else 0.0
    # relative slack keeps the exclusion symmetric under grid rounding
    pts = [float(e) for e in grid if abs(e - crit) > step * (1 + 1e-9)]
    n_max = cfg.n_max or 256

    def point(e):
        params = grid_params(cfg, e)
        out = [(e, b.sigma_minus_expectation.real, b.sigma_minus_expectation.imag, "analytic")
               for b in analytic.polarization_branches(params)]
        if classify_regime(params) is Regime.DISCRETE:
            p = _numeric_polarization(params, n_max)
            out.append((e, p.real, p.imag, "numeric"))
        return out

    rows = [r for chunk in _pmap(cfg, point, pts) for r in chunk]
    return Table(("epsilon", "re_sigma", "im_sigma", "source"), rows)


def cmd_dirac(cfg: RunConfig):
    """Landau energies in crossed fields, or a continuous-regime flag."""
    fields_ = FieldConfig(cfg.E, cfg.B, cfg.k2, cfg.k3)
    regime = classify_fields(fields_)
    if cfg.require == "discrete" and regime is not Regime.DISCRETE:
        raise ConfigError(f"requested a discrete table but the fields are {regime}")
    if cfg.require == "continuous" and regime is not Regime.CONTINUOUS:
        raise ConfigError(f"requested a continuous table but the fields are {regime}")
    rows = []
    for n in range(cfg.levels):
        if regime is Regime.DISCRETE:
            ep = analytic.dirac_energy_discrete(n, 1, fields_)
            em = analytic.dirac_energy_discrete(n, -1, fields_)
        else:
            ep = em = float("nan")
        rows.append((n, cfg.k2, cfg.k3, cfg.E, cfg.B, ep, em, str(regime)))
    return Table(("n", "k2", "k3", "E", "B", "energy_plus", "energy_minus", "regime"), rows)


def _check(name, compute, tol, strict=False):
    """Run one identity check; an exception counts as a failure."""
    entry = {"name": name}
    try:
        residual = float(compute())
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        residual = float("inf")
        entry["error"] = f"{type(exc).__name__}: {exc}"
    ok = residual < tol if strict else residual <= tol
    entry.update(residual=residual, tolerance=float(tol), passed=bool(ok and math.isfinite(residual)))
    entry["pass"] = entry.pop("passed")
    return entry


def _max_rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def _squeeze_residuals(cfg):
    params = ModelParams(cfg.lam, cfg.eps, cfg.eta)
    n = cfg.verify_n_max
    return [verify_squeeze_identity(params, BasisSpec(m), cfg.interior, cfg.flip_squeeze_sign).relative
            for m in (n // 4, n // 2, n)]


def _monotone_rise(rel):
    # ignore steps where both residuals sit at rounding level
    pairs = [(a, b) for a, b in zip(rel, rel[1:]) if max(a, b) > 1e-14]
    return max([max(0.0, b - a) for a, b in pairs], default=0.0)


def _optics_dirac(rng, draws):
    lam = rng.uniform(0.1, 10.0, draws)
    eps = lam * rng.uniform(0.0, 0.5, draws)
    worst = 0.0
    for l_, e_ in zip(lam, eps):
        p = ModelParams(l_, e_)
        f = optics_to_fields(p)
        for m in range(5):
            for s in (1, -1):
                worst = max(worst, _max_rel(analytic.dirac_energy_discrete(m, s, f),
                                            analytic.quasienergy_jc(m, s, p)))
    return worst


def _boost(rng, draws):
    worst = 0.0
    for _ in range(draws):
        b_ = rng.uniform(0.1, 5.0)
        f = FieldConfig(b_ * rng.uniform(0, 0.99), b_, rng.normal(), rng.normal())
        for m in range(4):
            for s in (1, -1):
                a1 = analytic.dirac_energy_discrete(m, s, f)
                a2 = analytic.dirac_energy_boosted(m, s, f)
                worst = max(worst, abs(a1 - a2) / max(abs(a1), 1.0))
    return worst


def _collapse_scaling(lam):
    p = ModelParams(lam, 0.3 * lam)
    ratio = [analytic.quasienergy_jc(m, 1, p) / analytic.quasienergy_jc(m, 1, p.with_eps(0.0))
             for m in range(51)]
    return np.max(np.abs(np.array(ratio) - 0.64 ** 0.75))


def disc_points(rng, count, radius):
    r = radius * np.sqrt(rng.uniform(size=count))
    return r * np.exp(2j * np.pi * rng.uniform(size=count))


def recurrence_residual(orders, args):
    """Worst relative residual of D_{a+1} - xi D_a + a D_{a-1} = 0."""
    worst = 0.0
    for a_, z in zip(orders, args):
        t = [special.pcf_d(a_ + 1, z), z * special.pcf_d(a_, z), a_ * special.pcf_d(a_ - 1, z)]
        worst = max(worst, abs(t[0] - t[1] + t[2]) / max(map(abs, t)))
    return worst


def erfc_residual(x):
    ref = np.array([math.sqrt(math.pi / 2) * math.exp(v * v / 4) * math.erfc(v / math.sqrt(2))
                    for v in x])
    return np.max(np.abs(special.pcf_d(-1.0, x) - ref))


def hermite_residual(x, n_top=5):
    worst = 0.0
    for m in range(n_top + 1):
        # D_m(x) = 2^{-m/2} e^{-x^2/4} H_m(x/sqrt 2) = sqrt(m! sqrt(pi)) psi_m(x/sqrt 2)
        lhs = special.pcf_d(float(m), x)
        rhs = math.sqrt(math.factorial(m) * math.sqrt(math.pi)) * special.hermite_psi(m, x / math.sqrt(2))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def _zero_mode_pol(lam):
    f = optics_to_fields(ModelParams(lam, 0.3 * lam))
    zero = analytic.zero_mode_discrete(f, np.linspace(-12, 12, 2001) * f.l_B)
    return abs(analytic.polarization_from_samples(zero).sigma_minus_expectation - 0.6j)


def _equator(lam):
    p = ModelParams(lam, 0.7 * lam)
    return max(abs(abs(b.sigma_minus_expectation) - 1) for b in analytic.polarization_branches(p))


def _jc_exact(lam):
    ev = eig_operator(build_h0(ModelParams(lam, 0.0), BasisSpec(64))).eigenvalues
    target = lam * np.sqrt(np.arange(1, 41))
    return max(np.max(np.min(np.abs(ev[:, None] - target[None, :]), axis=0)),
               np.max(np.min(np.abs(ev[:, None] + target[None, :]), axis=0)))


def cmd_verify(cfg: RunConfig):
    """Run the identity suite; returns the JSON-ready report."""
    rng = np.random.default_rng(cfg.seed)
    checks = []
    rel = []

    def squeeze():
        rel.extend(_squeeze_residuals(cfg))
        return rel[-1]

    checks.append(_check("squeeze_identity", squeeze, 1e-6, strict=True))
    checks.append(_check("squeeze_monotone", lambda: _monotone_rise(rel) if rel else math.inf, 0.0))
    checks.append(_check("optics_dirac_identity", lambda: _optics_dirac(rng, cfg.draws), 1e-12))
    checks.append(_check("boost_consistency", lambda: _boost(rng, cfg.draws), 1e-12))
    checks.append(_check("collapse_scaling", lambda: _collapse_scaling(cfg.lam), 1e-14))
    xi = disc_points(rng, 20, 4.0)
    checks.append(_check("pcf_d0", lambda: _max_rel(special.pcf_d(0.0, xi), np.exp(-xi * xi / 4)), 1e-12))
    orders = disc_points(rng, 100, 3.0)
    args = disc_points(rng, 100, 3.0)
    checks.append(_check("pcf_recurrence", lambda: recurrence_residual(orders, args), 1e-8))
    checks.append(_check("pcf_erfc", lambda: erfc_residual(np.linspace(0.0, 3.0, 61)), 1e-8))
    checks.append(_check("pcf_hermite", lambda: hermite_residual(np.linspace(-3.0, 3.0, 61)), 1e-9))
    checks.append(_check("zero_mode_polarization", lambda: _zero_mode_pol(cfg.lam), 1e-10))
    checks.append(_check("equator_modulus", lambda: _equator(cfg.lam), 1e-12))
    checks.append(_check("jc_exact_spectrum", lambda: _jc_exact(cfg.lam), 1e-10))
    code = 0 if all(c["pass"] for c in checks) else 2
    return {"suite": "quasicollapse-identities", "checks": checks, "exit_code": code}
