"""Command-line entry point.

Exit codes: 0 success, 2 configuration or singular input, 3 numerical failure,
4 oracle outside tolerance, 5 resource bounds exceeded.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .bath import IntegrationError, ResourceError, build_bath, evolve_moments, extract_decay
from .config import ConfigError, RunConfig, load_config
from .decoherence import CatStateSpec, CutoffError, c12, c12_from_gamma
from .engineering import (SingularDetuningError, dispersive_compare, effective_stark,
                          regime_check)
from .fock import TruncatedState, coherence_extract, evolve_master, gamma_interpolant
from .io import atomic_write, echo_header, write_csv, write_plot
from .kernel import (big_omega, damping_trace, samples_per_period,
                     stationary_reference)
from .params import ModulationSpec, StationaryModeError, derive_groups
from .quadrature import QuadratureError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_TOLERANCE, EXIT_RESOURCE = 0, 2, 3, 4, 5


@dataclass(frozen=True)
class Profile:
    kernel_atol: float
    trace_tol: float
    ode_rtol: float
    bath_rel_tol: float
    fock_abs_tol: float


PROFILES = {
    "default": Profile(1e-9, 1e-9, 1e-10, 0.05, 1e-3),
    "strict": Profile(1e-11, 1e-11, 1e-11, 0.05, 1e-4),
}


def _trace(cfg: RunConfig, mod: ModulationSpec, prof: Profile, n: int | None = None):
    res = cfg.reservoir_spec()
    t_max = cfg.t_max()
    n = samples_per_period(mod, t_max, n or cfg.run.samples)
    if mod.stationary:
        return damping_trace(mod, res, t_max, n)
    return damping_trace(mod, res, t_max, n, tol=prof.trace_tol, atol=prof.kernel_atol)


def _labelled(cfg):
    return [("stationary" if m.stationary else label, m) for label, m in cfg.modulations()]


def _out(cfg, name) -> Path:
    return Path(cfg.run.output) / name


def _scaled(cfg, mod, t):
    g0 = cfg.reservoir_spec().gamma0
    return g0 * t, (mod.zeta * t if not mod.stationary else np.zeros_like(t))


def cmd_gamma(cfg: RunConfig, prof: Profile) -> int:
    header = echo_header(cfg, "gamma")
    cols = ["t", "gamma0_t", "zeta_t", "re_gamma", "im_gamma", "re_big_gamma", "im_big_gamma"]
    for label, mod in _labelled(cfg):
        tr = _trace(cfg, mod, prof)
        g0t, zt = _scaled(cfg, mod, tr.times)
        rows = zip(tr.times, g0t, zt, tr.gamma.real, tr.gamma.imag,
                   tr.big_gamma.real, tr.big_gamma.imag)
        path = write_csv(_out(cfg, f"gamma_{label}.csv"), cols, rows, header)
        write_plot(path, "gamma0_t", ["re_big_gamma"], cols, ylabel="Re Gamma")
        print(path)
    return EXIT_OK


def cmd_c12(cfg: RunConfig, prof: Profile) -> int:
    cfg.require("cat")
    res = cfg.reservoir_spec()
    a0 = cfg.cat.alpha0
    t_max = cfg.t_max()
    mods = [(label, m) for label, m in _labelled(cfg) if not m.stationary]
    n = max([samples_per_period(m, t_max, cfg.run.samples) for _, m in mods]
            + [cfg.run.samples])
    times = t_max * np.arange(n) / (n - 1)
    cols = ["t", "gamma0_t", "stationary"]
    data = [times, res.gamma0 * times, c12_from_gamma(a0, stationary_reference(res, times))]
    for label, mod in mods:
        tr = _trace(cfg, mod, prof, n)
        cols.append(label)
        data.append(c12(a0, tr, times))
    path = write_csv(_out(cfg, "c12.csv"), cols, zip(*data), echo_header(cfg, "c12"))
    write_plot(path, "gamma0_t", cols[2:], cols, ylabel="C12")
    print(path)
    return EXIT_OK


def cmd_trajectory(cfg: RunConfig, prof: Profile) -> int:
    cfg.require("cat")
    a0 = cfg.cat.alpha0
    zero_bath = cfg.reservoir.gamma0 == 0
    if zero_bath:
        if cfg.run.t_max <= 0:
            raise ConfigError("gamma0 = 0 needs an absolute [run] t_max", section="run",
                              key="t_max")
        mods = [("modulation" if "modulation" in cfg.present else "free",
                 ModulationSpec(cfg.modulation.omega0, cfg.modulation.chi,
                                cfg.modulation.zeta, cfg.modulation.sign))]
        t_max, g0 = cfg.run.t_max, 0.0
    else:
        mods = _labelled(cfg)
        t_max, g0 = cfg.t_max(), cfg.reservoir_spec().gamma0
    header = echo_header(cfg, "trajectory")
    cols = ["t", "gamma0_t", "re_plus", "im_plus", "re_minus", "im_minus"]
    for label, mod in mods:
        omega0 = (cfg.run.display_omega0_ratio * g0 if cfg.run.display_omega0_ratio > 0
                  else mod.omega0)
        shown = ModulationSpec(omega0, mod.chi, mod.zeta, mod.sign)
        # At least 200 points per rotation at the fastest instantaneous frequency.
        n = max(cfg.run.samples, int(math.ceil(t_max * (omega0 + mod.chi) / (2 * math.pi) * 200)) + 1)
        times = t_max * np.arange(n) / (n - 1)
        if zero_bath:
            big = np.zeros(n, dtype=complex)
        else:
            big = _trace(cfg, mod, prof).big_gamma_at(times)
        a = a0 * np.exp(-1j * big_omega(shown, times) - big)
        rows = zip(times, g0 * times, a.real, a.imag, -a.real, -a.imag)
        path = write_csv(_out(cfg, f"trajectory_{label}.csv"), cols, rows, header)
        write_plot(path, "re_plus", ["im_plus"], cols, xlabel="Re alpha", ylabel="Im alpha")
        print(path)
    return EXIT_OK


def _oracle_bath(cfg: RunConfig, prof: Profile) -> bool:
    cfg.require("bath")
    res = cfg.reservoir_spec()
    t_max = cfg.t_max()
    b = cfg.bath
    ok = True
    header = echo_header(cfg, "oracle bath")
    cols = ["t", "gamma0_t", "re_gamma_oracle", "re_gamma_prediction", "rel_diff"]
    for label, mod in _labelled(cfg):
        grid = build_bath(res, mod, t_max, b.modes, halfwidth_xi_multiples=b.halfwidth_xi_multiples,
                          horizon_factor=b.horizon_factor)
        times = t_max * np.arange(cfg.run.oracle_samples) / (cfg.run.oracle_samples - 1)
        env = extract_decay(evolve_moments(grid, mod, res, 1.0, t_max, times), mod)
        if mod.stationary:
            pred = stationary_reference(res, env.times)
        else:
            pred = _trace(cfg, mod, prof).big_gamma_at(env.times).real
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(pred != 0, np.abs(env.re_gamma - pred) / np.abs(pred), 0.0)
        window = res.gamma0 * env.times >= 0.2
        worst = float(rel[window].max()) if window.any() else 0.0
        passed = worst < prof.bath_rel_tol
        ok &= passed
        rows = zip(env.times, res.gamma0 * env.times, env.re_gamma, pred, rel)
        path = write_csv(_out(cfg, f"oracle_bath_{label}.csv"), cols, rows, header)
        write_plot(path, "gamma0_t", ["re_gamma_oracle", "re_gamma_prediction"], cols)
        print(f"{path}: max rel diff {worst:.3e} (gamma0 t >= 0.2) "
              f"{'PASS' if passed else 'FAIL'} < {prof.bath_rel_tol:g}"
              + (f"; {env.note}" if env.note else ""))
    return ok


def _oracle_fock(cfg: RunConfig, prof: Profile) -> bool:
    cfg.require("cat")
    spec = CatStateSpec.even_cat(cfg.cat.alpha0)
    g0 = cfg.reservoir_spec().gamma0
    t_max = cfg.t_max()
    ok = True
    header = echo_header(cfg, "oracle fock")
    cols = ["t", "gamma0_t", "coherence_oracle", "coherence_closed_form", "abs_diff"]
    for label, mod in _labelled(cfg):
        tr = _trace(cfg, mod, prof)
        states = evolve_master(TruncatedState.from_cat(spec, cfg.cat.n_cut), gamma_interpolant(tr),
                               t_max, cfg.run.oracle_samples, rtol=prof.ode_rtol)
        series = coherence_extract(states, spec)
        closed = c12(spec.amplitudes[0], tr, series.times)
        diff = np.abs(series.coherence - closed)
        worst = float(np.nanmax(diff)) if series.valid.any() else math.inf
        drift = max(abs(s.trace - 1) for s in states)
        passed = worst < prof.fock_abs_tol
        ok &= passed
        rows = zip(series.times, g0 * series.times, series.coherence, closed, diff)
        path = write_csv(_out(cfg, f"oracle_fock_{label}.csv"), cols, rows, header)
        write_plot(path, "gamma0_t", ["coherence_oracle", "coherence_closed_form"], cols)
        print(f"{path}: max |diff| {worst:.3e}, trace drift {drift:.1e} "
              f"{'PASS' if passed else 'FAIL'} < {prof.fock_abs_tol:g}"
              + (f"; {series.note}" if series.note else ""))
    return ok


def cmd_oracle(cfg: RunConfig, prof: Profile, which: str) -> int:
    ok = _oracle_bath(cfg, prof) if which == "bath" else _oracle_fock(cfg, prof)
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_engineer(cfg: RunConfig, prof: Profile) -> int:
    spec = cfg.drive_spec()
    d = cfg.drive
    stark = effective_stark(spec, d.zeta, d.convention)
    lines = [f"Upsilon1 = {stark.upsilon1!r} rad/s", f"Upsilon2 = {stark.upsilon2!r} rad/s"]
    if stark.upsilon2 == 0:
        lines.append("note: F0 = 0 gives a static shift; stationary output")
    for chk in regime_check(spec, d.zeta, d.n_max):
        lines.append(f"regime {chk.name:<22} ratio {chk.ratio:10.4g}  {chk.status}")
    try:
        mod = stark.engineered_modulation()
    except ValueError as exc:
        raise ConfigError(str(exc), section="drive", key="omega_c") from exc
    lines.append(f"engineered omega0 = {mod.omega0!r}, chi = {mod.chi!r}, "
                 f"zeta = {mod.zeta!r}, sign = {mod.sign}")
    ini = ["[modulation]", f"omega0 = {mod.omega0!r}", f"chi = {mod.chi!r}",
           f"zeta = {mod.zeta!r}", f"sign = {mod.sign}", ""]
    if "reservoir" in cfg.present:
        r = cfg.reservoir
        ini += ["[reservoir]", f"gamma0 = {r.gamma0!r}", f"xi = {r.xi!r}",
                f"lambda0 = {r.lambda0!r}", ""]
        if not mod.stationary:
            grp = derive_groups(mod, cfg.reservoir_spec())
            lines.append(f"varkappa = {grp.varkappa!r}, kappa = {grp.kappa!r}, "
                         f"epsilon = {grp.epsilon!r}")
    header = echo_header(cfg, "engineer")
    out = _out(cfg, "engineered.ini")
    atomic_write(out, header + "\n".join(ini))
    lines.append(f"wrote {out}")
    if d.compare:
        rep = dispersive_compare(spec, d.zeta, cfg.cat.alpha0, d.n_cut, 2 * math.pi / d.zeta,
                                 n_max=d.n_max, samples=cfg.run.samples, rtol=prof.ode_rtol)
        cols = ["t", "pop_ground", "phase_error_max", "phase_error_max_james",
                "relative_phase_error_max"]
        rows = zip(rep.times, rep.pop_ground, rep.phase_error_max("printed"),
                   rep.phase_error_max("james"), np.max(np.abs(rep.relative_phase_error), axis=1))
        path = write_csv(_out(cfg, "dispersive.csv"), cols, rows, header)
        write_plot(path, "t", cols[1:], cols)
        lines += [f"min ground population {rep.pop_ground.min():.6f}",
                  f"max phase error, F^2/delta1 shift: {rep.max_error('printed'):.4e} rad",
                  f"max phase error, F^2/delta2 shift: {rep.max_error('james'):.4e} rad",
                  f"max relative (n vs 0) phase error: {np.abs(rep.relative_phase_error).max():.4e} rad",
                  f"wrote {path}"]
    print("\n".join(lines))
    return EXIT_OK


COMMANDS = {
    "gamma": cmd_gamma, "c12": cmd_c12, "trajectory": cmd_trajectory,
    "engineer": cmd_engineer,
    "oracle-bath": lambda c, p: cmd_oracle(c, p, "bath"),
    "oracle-fock": lambda c, p: cmd_oracle(c, p, "fock"),
}


def _sweep_entry(args):
    cfg, command, profile = args
    return _guarded(lambda: COMMANDS[command](cfg, PROFILES[profile]))


def cmd_sweep(cfg: RunConfig, prof_name: str) -> int:
    cfg.require("sweep")
    sw = cfg.sweep
    if sw.command not in COMMANDS:
        raise ConfigError(f"unknown sweep command {sw.command!r}", section="sweep", key="command")
    if not sw.values:
        raise ConfigError("no sweep values", section="sweep", key="values")
    jobs = []
    for v in sw.values:
        entry = cfg.with_value(sw.parameter, v)
        out = Path(cfg.run.output) / f"{sw.parameter}={v}"
        entry = replace(entry, run=replace(entry.run, output=str(out)))
        jobs.append((entry, sw.command, prof_name))
    if sw.workers > 1:
        with ProcessPoolExecutor(max_workers=sw.workers) as pool:
            codes = list(pool.map(_sweep_entry, jobs))
    else:
        codes = [_sweep_entry(j) for j in jobs]
    for v, code in zip(sw.values, codes):
        print(f"{sw.parameter}={v}: exit {code}")
    return max(codes)


def _guarded(fn) -> int:
    try:
        return fn()
    except (ConfigError, SingularDetuningError, StationaryModeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceError, CutoffError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (QuadratureError, IntegrationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nsmode", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, help="INI run configuration")
    p.add_argument("--out", help="output directory (overrides [run] output)")
    p.add_argument("--tolerance-profile", choices=sorted(PROFILES), default="default")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gamma", help="complex damping trace per parameter set")
    sub.add_parser("c12", help="cat-state coherence curves")
    sub.add_parser("trajectory", help="phase-space trajectories of the cat components")
    o = sub.add_parser("oracle", help="compare closed forms against an oracle")
    o.add_argument("which", choices=["bath", "fock"])
    sub.add_parser("engineer", help="Stark-shift engineering report")
    sub.add_parser("sweep", help="run a command over a list of parameter values")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        cfg = replace(cfg, run=replace(cfg.run, output=args.out))
    prof = PROFILES[args.tolerance_profile]
    if args.command == "sweep":
        return _guarded(lambda: cmd_sweep(cfg, args.tolerance_profile))
    name = f"oracle-{args.which}" if args.command == "oracle" else args.command
    return _guarded(lambda: COMMANDS[name](cfg, prof))


if __name__ == "__main__":
    sys.exit(main())
