"""Point evaluation, parameter sweeps and the figure-style reports."""
import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from types import SimpleNamespace

import numpy as np
from scipy.optimize import brentq

from . import __version__
from .bath import (
    fgr_rates, fgr_rates_perturbative, effective_rates, floquet_rates, generator_q0,
    generator_secular, photon_range, rate_tensor, thermal_table, transition_elements,
)
from .config import Axis, RunConfig, config_text
from .dynamics import evolve, initial_state, period_average, steady_state
from .entanglement import concurrence, concurrence_trace, nearest_physical
from .errors import AmbiguousTracking, ConfigError
from .floquet import direct_labels, label_floquet_states, solve_floquet
from .model import build_coupling_op, build_h0, diagonalize_h0
from .numerics import hermitian_eig

WORKERS_ENV = "FLOQENT_WORKERS"
RATE_PAIRS = ((1, 2), (0, 2), (2, 3), (0, 1), (1, 3))
RESONANCE_WINDOW = 0.02
CLIP_TOL = 1e-6

POINT_FIELDS = (
    ["C_inf", "P0", "P1", "P2", "P3"]
    + [f"G{f}{i}" for f, i in RATE_PAIRS]
    + ["min_quasienergy_gap", "resonance_distance", "near_resonance",
       "labeling", "negativity_clipped", "error"]
)


def default_workers():
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}")
    return os.cpu_count() or 1


def resonance_distance(model):
    """Distance of eps0 +- |J|/2 from the nearest multiple of omega."""
    w = model.omega
    return min(abs((model.eps0 + s * model.eps_c) / w - round((model.eps0 + s * model.eps_c) / w))
               for s in (1, -1)) * w


def prepare(cfg: RunConfig, labels=True):
    """Run the model -> floquet -> bath chain for a single-point config."""
    p, d, b, num = cfg.model, cfg.drive, cfg.bath, cfg.numerics
    eig = diagonalize_h0(p)
    sol = solve_floquet(p, d, kmax=num.kmax, tol=num.tol, allow_degenerate=True)
    labeling = "none"
    if labels:
        try:
            perm = label_floquet_states(sol, eig, p, d, steps=num.label_steps)
            labeling = "ramp"
        except AmbiguousTracking:
            perm = direct_labels(sol, eig)
            labeling = "direct"
        sol = sol.relabel(perm)
    coupling = build_coupling_op(b.gamma1, b.xi)
    a_table = transition_elements(sol, coupling)
    g_table = thermal_table(sol.quasienergies, photon_range(a_table), b, sol.omega)
    r = rate_tensor(g_table, a_table)
    build = generator_secular if num.generator == "secular" else generator_q0
    return SimpleNamespace(
        p=p, d=d, b=b, eig=eig, sol=sol, labeling=labeling, coupling=coupling,
        a_table=a_table, g_table=g_table, r=r, gen=build(r, sol.quasienergies),
    )


def run_point(cfg: RunConfig):
    """Steady-state concurrence, populations and dominant Floquet rates at one point.

    Errors are captured in the record's ``error`` field instead of raised.
    """
    rec = {k: math.nan for k in POINT_FIELDS}
    rec.update(labeling="", near_resonance=False, negativity_clipped=False, error="")
    try:
        rec["resonance_distance"] = float(resonance_distance(cfg.model))
        rec["near_resonance"] = rec["resonance_distance"] < RESONANCE_WINDOW
        ctx = prepare(cfg)
        rec["labeling"] = ctx.labeling
        rec["min_quasienergy_gap"] = float(ctx.sol.min_gap)
        table = floquet_rates(ctx.g_table, ctx.a_table)
        for f, i in RATE_PAIRS:
            rec[f"G{f}{i}"] = table[f, i]
        rho = period_average(steady_state(ctx.gen, ctx.sol), ctx.sol).entries
        projected, lowest = nearest_physical(rho)
        if lowest < -CLIP_TOL:
            raise ValueError(f"steady state has eigenvalue {lowest:.2e}")
        if lowest < -1e-10:
            rec["negativity_clipped"] = True
            rho = projected
        pops = np.real(np.diag(ctx.eig.states.conj().T @ rho @ ctx.eig.states))
        for k in range(4):
            rec[f"P{k}"] = float(pops[k])
        rec["C_inf"] = float(concurrence(rho).value)
    except Exception as exc:  # a sweep never aborts on one point
        rec["error"] = f"{type(exc).__name__}: {exc}"
    return rec


@dataclass
class SweepResult:
    axes: tuple
    coords: list          # one dict per point, grid order
    records: list
    provenance: dict = field(default_factory=dict)

    @property
    def failures(self):
        return sum(1 for r in self.records if r["error"])

    def grid(self, key="C_inf"):
        """Values on the grid, shape (len(y), len(x)) for two axes."""
        vals = np.array([r[key] for r in self.records], dtype=float)
        shape = [a.steps for a in self.axes]
        if len(shape) == 2:
            return vals.reshape(shape).T
        return vals.reshape(shape or [1])

    def header(self):
        return [a.name for a in self.axes] + list(POINT_FIELDS)

    def rows(self):
        for c, r in zip(self.coords, self.records):
            yield [c[a.name] for a in self.axes] + [r[k] for k in POINT_FIELDS]


def grid_points(cfg: RunConfig):
    """Coordinates in deterministic order: first axis outer, second inner."""
    names = [a.name for a in cfg.sweep]
    for values in itertools.product(*(a.values() for a in cfg.sweep)):
        yield dict(zip(names, (float(v) for v in values)))


def _run_coords(args):
    cfg, coords = args
    return run_point(cfg.at(**coords))


def sweep(cfg: RunConfig, workers=None):
    """Evaluate every grid point; independent points run in a process pool."""
    if not 1 <= len(cfg.sweep) <= 2:
        raise ConfigError("a sweep needs one or two axes")
    workers = default_workers() if workers is None else int(workers)
    coords = list(grid_points(cfg))
    start = time.perf_counter()
    jobs = [(cfg, c) for c in coords]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_coords, jobs, chunksize=1))
    else:
        records = [_run_coords(j) for j in jobs]
    return SweepResult(cfg.sweep, coords, records,
                       provenance(cfg, wall_time=time.perf_counter() - start, workers=workers))


def provenance(cfg: RunConfig, **extra):
    import scipy
    info = {"package": f"floqent {__version__}", "numpy": np.__version__,
            "scipy": scipy.__version__, "config": config_text(cfg)}
    info.update(extra)
    return info


def _axis(cfg, name, default):
    for a in cfg.sweep:
        if a.name == name:
            return a
    return default


def crossover(xs, fn):
    """Root of ``fn`` on the bracket [xs[0], xs[-1]] located from a sign change on ``xs``."""
    vals = np.array([fn(x) for x in xs])
    change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if change.size == 0:
        return math.nan
    k = change[0]
    return brentq(fn, xs[k], xs[k + 1], xtol=1e-12)


def rates_report(cfg: RunConfig):
    """Rate tables across the xi axis in the four bases, plus xi_c per basis.

    The Floquet solution does not depend on xi, so it is solved once.
    """
    axis = _axis(cfg, "xi", Axis("xi", 0.0, 1.0, 101))
    ctx = prepare(cfg.at(xi=float(axis.start)))
    b0 = cfg.bath

    def tables(xi):
        b = type(b0)(**{**b0.__dict__, "xi": float(xi)})
        coupling = build_coupling_op(b.gamma1, b.xi)
        a = transition_elements(ctx.sol, coupling)
        g = thermal_table(ctx.sol.quasienergies, photon_range(a), b, ctx.sol.omega)
        floq = floquet_rates(g, a)
        try:
            pert = fgr_rates_perturbative(ctx.p, b)
        except Exception:
            pert = None
        return {"perturbative": pert, "exact": fgr_rates(ctx.eig, coupling, b),
                "effective": effective_rates(floq, ctx.sol, ctx.eig), "floquet": floq}

    bases = ("perturbative", "exact", "effective", "floquet")
    xs = axis.values()
    fine = np.linspace(0.0, 1.0, 41)
    xi_c = {}
    for basis in bases:
        def diff(x, basis=basis):
            t = tables(x)[basis]
            return math.nan if t is None else t[1, 2] - t[0, 2]
        try:
            xi_c[basis] = crossover(fine, diff)
        except ValueError:
            xi_c[basis] = math.nan

    header = ["xi"] + [f"{basis}_G{f}{i}" for basis in bases for f, i in RATE_PAIRS] \
        + [f"xi_c_{basis}" for basis in bases]
    rows = []
    for x in xs:
        t = tables(x)
        row = [float(x)]
        for basis in bases:
            row += [math.nan if t[basis] is None else t[basis][f, i] for f, i in RATE_PAIRS]
        rows.append(row + [xi_c[b] for b in bases])
    return header, rows


def thin_indices(n, points, mode="log"):
    """Indices 0..n-1 to keep; log mode keeps roughly ``points`` log-spaced instants."""
    if mode == "none" or n <= points:
        return np.arange(n)
    idx = np.unique(np.round(np.logspace(0, math.log10(n - 1), points)).astype(int))
    return np.concatenate([[0], idx])


def trace_report(cfg: RunConfig):
    """Stroboscopic populations and concurrence from the H0 ground state."""
    if cfg.sweep:
        raise ConfigError("trace needs a single point (no sweep axes)")
    num = cfg.numerics
    ctx = prepare(cfg)
    rec = evolve(ctx.gen, ctx.sol, initial_state(ctx.eig, ctx.sol),
                 num.horizon, num.stride, ctx.eig)
    keep = thin_indices(len(rec.times), num.thin_points, num.thin)
    thinned = type(rec)(rec.times[keep], rec.states[keep], rec.populations[keep], rec.frame)
    conc = concurrence_trace(thinned)
    header = ["t_over_tau", "P0", "P1", "P2", "P3", "C"]
    rows = [[t, *map(float, pops), float(c)]
            for (t, c), pops in zip(conc, thinned.populations)]
    return header, rows


def spectrum_report(cfg: RunConfig):
    """H0 energies and ground-state concurrence across eps0 (drive ignored)."""
    axis = _axis(cfg, "eps0", Axis("eps0", -5.0, 5.0, 101))
    rows = []
    for x in axis.values():
        model = cfg.at(eps0=x).model
        energies, states = hermitian_eig(build_h0(model))
        ground = states[:, 0]
        rows.append([float(x), *map(float, energies),
                     float(concurrence(np.outer(ground, ground.conj())).value)])
    return ["eps0", "E0", "E1", "E2", "E3", "C_ground"], rows


def onset_amplitude(amplitudes, values, fraction=0.9):
    """First amplitude at which ``values`` reaches ``fraction`` of its maximum."""
    values = np.asarray(values, dtype=float)
    target = fraction * np.nanmax(values)
    hit = np.nonzero(values >= target)[0]
    return float(np.asarray(amplitudes)[hit[0]]) if hit.size else math.nan
