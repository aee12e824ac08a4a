"""Command-line front end: sweeps, optimisation, simulation, figure data.

Every run writes one header-bearing CSV (or JSON array) whose rows echo all
inputs, so each artifact is self-describing.  Output is byte-identical for
identical configuration and seed.  Exit codes: 0 success, 1 numeric hard
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    ChannelParams,
    ProtocolParams,
    attenuation_db_to_transmissivity,
    shared_state,
)
from .errors import DomainError, SqccError
from .finitekey import SecurityParams, finite_rate, optimise_v_finite
from .keyrate import asymptotic_rate, optimise_v
from .montecarlo import (
    RNG_ALGORITHM,
    discriminate_and_redisplace,
    empirical_moments,
    estimation_pipeline,
    sample_joint,
)
from .postprocess import (
    RenormStrategy,
    postprocess_stats,
    renormalise,
    required_displacement,
)

__all__ = ["RunConfig", "run", "main"]

COMMANDS = (
    "sweep-asymptotic",
    "sweep-finite",
    "optimize",
    "simulate",
    "validate-fig2",
    "compare-baseline",
)

OUTPUT_DIR_ENV = "SQCCQKD_OUTPUT_DIR"


@dataclass
class RunConfig:
    """Fully resolved run description (flags merged over config-file values)."""

    command: str
    t_values: list[float] = field(default_factory=list)
    w_values: list[float] = field(default_factory=list)
    excess_noise: float = 0.05
    beta: float = 0.95
    sigma: float = 0.0
    strategy: RenormStrategy = RenormStrategy.B_PRESERVING
    modulation_variance: float = 5.0
    optimize_v: bool = False
    mi_double: bool = False
    block_sizes: list[float] = field(default_factory=list)
    security: SecurityParams | None = None
    d_values: list[float] = field(default_factory=list)
    n_shots: int = 100_000
    seed: int = 42
    symbol_schedule: str | int = "uniform-random"
    disclose_fraction: float | None = None
    output: str = ""
    fmt: str = "csv"
    shots_output: str = ""

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.fmt not in ("csv", "json"):
            raise DomainError(f"output format must be csv or json, got {self.fmt!r}")


def _fmt(value) -> str:
    """Full-precision, roundtrip-stable cell rendering."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_rows(rows: list[dict], columns: list[str], config: RunConfig) -> str:
    path = config.output
    if not path:
        base = os.environ.get(OUTPUT_DIR_ENV, ".")
        path = os.path.join(base, f"{config.command}.{config.fmt}")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    if config.fmt == "json":
        payload = [{k: row.get(k, "") for k in columns} for row in rows]
        with open(path, "w", newline="") as fh:
            json.dump(payload, fh, indent=2, default=_fmt)
            fh.write("\n")
    else:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(row.get(k, "")) for k in columns])
    return path


def _channel(config: RunConfig, t: float) -> ChannelParams:
    return ChannelParams(
        transmissivity=t,
        excess_noise=config.excess_noise,
        phase_noise_factor=config.sigma,
    )


_COMMON = ["T", "W", "V", "d", "eps", "beta", "sigma", "strategy"]
_DIAG = ["snr", "e_C", "delta", "a_d", "b_d", "c_d", "delta_v",
         "I_AB", "chi_EB", "K", "feasible", "error"]


def _diagnostic_row(config: RunConfig, t: float, w: float, v: float) -> dict:
    """All pipeline quantities at one (T, W, V) point."""
    chan = _channel(config, t)
    d = required_displacement(v, chan, w)
    proto = ProtocolParams(v, d, config.beta)
    row = {
        "T": t, "W": w, "V": v, "d": d,
        "eps": config.excess_noise, "beta": config.beta, "sigma": config.sigma,
        "strategy": config.strategy.value, "error": "",
    }
    base = shared_state(proto, chan, symbol_index=1)
    stats = postprocess_stats(proto, chan)
    renorm = renormalise(stats, base, config.strategy)
    rate = asymptotic_rate(proto, chan, config.strategy, w, config.mi_double)
    row.update({
        "snr": stats.snr, "e_C": stats.e_c, "delta": stats.delta,
        "a_d": stats.a_d, "b_d": stats.b_d, "c_d": stats.c_d,
        "delta_v": renorm.delta_v,
        "I_AB": rate.mutual_information, "chi_EB": rate.holevo, "K": rate.rate,
        "feasible": rate.feasible,
    })
    return row


def _sweep_asymptotic(config: RunConfig) -> tuple[list[dict], list[str]]:
    columns = _COMMON + ["v_star", "k_star"] + _DIAG
    rows, warnings = [], 0
    for t in config.t_values:
        for w in config.w_values:
            try:
                if config.optimize_v:
                    opt = optimise_v(_channel(config, t), w, config.strategy,
                                     config.beta, mi_double=config.mi_double)
                    v = opt.v_star if math.isfinite(opt.v_star) \
                        else config.modulation_variance
                    row = _diagnostic_row(config, t, w, v)
                    row["v_star"] = opt.v_star
                    row["k_star"] = opt.k_star
                else:
                    row = _diagnostic_row(config, t, w, config.modulation_variance)
                    row["v_star"] = ""
                    row["k_star"] = ""
                rows.append(row)
            except SqccError as exc:
                warnings += 1
                rows.append({"T": t, "W": w, "V": config.modulation_variance,
                             "eps": config.excess_noise, "beta": config.beta,
                             "sigma": config.sigma,
                             "strategy": config.strategy.value,
                             "feasible": False, "error": str(exc)})
    if warnings:
        print(f"warning: {warnings} row(s) failed and were flagged", file=sys.stderr)
    return rows, columns


def _sweep_finite(config: RunConfig) -> tuple[list[dict], list[str]]:
    columns = (_COMMON + ["N", "v_star", "k_star"] + _DIAG
               + ["K_PE", "K_F", "ell", "epsilon_total"])
    rows, warnings = [], 0
    for n in config.block_sizes or [1e8]:
        sec = _security(config, n)
        for t in config.t_values:
            for w in config.w_values:
                try:
                    chan = _channel(config, t)
                    if config.optimize_v:
                        opt = optimise_v_finite(chan, w, sec, config.strategy,
                                                config.beta,
                                                mi_double=config.mi_double)
                        v = opt.v_star if math.isfinite(opt.v_star) \
                            else config.modulation_variance
                    else:
                        opt = None
                        v = config.modulation_variance
                    row = _diagnostic_row(config, t, w, v)
                    d = required_displacement(v, chan, w)
                    res = finite_rate(ProtocolParams(v, d, config.beta), chan,
                                      config.strategy, sec, config.mi_double)
                    row.update({
                        "N": n,
                        "v_star": opt.v_star if opt else "",
                        "k_star": opt.k_star if opt else "",
                        "K_PE": res.k_pe_inf, "K_F": res.rate,
                        "ell": res.key_length, "epsilon_total": res.epsilon_total,
                        "feasible": res.feasible,
                    })
                    rows.append(row)
                except SqccError as exc:
                    warnings += 1
                    rows.append({"T": t, "W": w, "N": n,
                                 "eps": config.excess_noise, "beta": config.beta,
                                 "sigma": config.sigma,
                                 "strategy": config.strategy.value,
                                 "feasible": False, "error": str(exc)})
    if warnings:
        print(f"warning: {warnings} row(s) failed and were flagged", file=sys.stderr)
    return rows, columns


def _optimize(config: RunConfig) -> tuple[list[dict], list[str]]:
    columns = ["T", "W", "eps", "beta", "sigma", "strategy", "model", "N",
               "v_star", "k_star", "evaluations", "bracket_low", "bracket_high"]
    rows = []
    for t in config.t_values:
        for w in config.w_values:
            chan = _channel(config, t)
            if config.block_sizes:
                n = config.block_sizes[0]
                opt = optimise_v_finite(chan, w, _security(config, n),
                                        config.strategy, config.beta,
                                        mi_double=config.mi_double)
                n_cell = n
            else:
                opt = optimise_v(chan, w, config.strategy, config.beta,
                                 mi_double=config.mi_double)
                n_cell = ""
            rows.append({
                "T": t, "W": w, "eps": config.excess_noise, "beta": config.beta,
                "sigma": config.sigma, "strategy": config.strategy.value,
                "model": "sqcc", "N": n_cell,
                "v_star": opt.v_star, "k_star": opt.k_star,
                "evaluations": opt.evaluations,
                "bracket_low": opt.bracket[0], "bracket_high": opt.bracket[1],
            })
    return rows, columns


def _compare_baseline(config: RunConfig) -> tuple[list[dict], list[str]]:
    columns = ["T", "W", "eps", "beta", "sigma",
               "v_star_sqcc", "k_star_sqcc", "v_star_baseline", "k_star_baseline",
               "advantage"]
    rows = []
    for t in config.t_values:
        for w in config.w_values:
            chan = _channel(config, t)
            new = optimise_v(chan, w, config.strategy, config.beta, model="sqcc",
                             mi_double=config.mi_double)
            old = optimise_v(chan, w, config.strategy, config.beta, model="baseline",
                             mi_double=config.mi_double)
            rows.append({
                "T": t, "W": w, "eps": config.excess_noise, "beta": config.beta,
                "sigma": config.sigma,
                "v_star_sqcc": new.v_star, "k_star_sqcc": new.k_star,
                "v_star_baseline": old.v_star, "k_star_baseline": old.k_star,
                "advantage": new.k_star >= old.k_star,
            })
    return rows, columns


_SIM_COLUMNS = (_COMMON + ["n", "seed", "rng", "schedule",
                           "snr", "e_C", "a_d", "b_d", "c_d",
                           "a_hat", "a_se", "b_hat", "b_se", "c_hat", "c_se",
                           "e_C_hat", "e_C_se",
                           "mean_bx_hat", "mean_bx_se", "mean_by_hat", "mean_by_se",
                           "snr_hat", "delta_v_hat", "error"])


def _simulate_row(config: RunConfig, d: float, seed: int) -> dict:
    chan = _channel(config, config.t_values[0])
    proto = ProtocolParams(config.modulation_variance, d, config.beta)
    stats = postprocess_stats(proto, chan)
    batch = sample_joint(proto, chan, config.symbol_schedule, config.n_shots, seed)
    post = discriminate_and_redisplace(batch, proto, chan)
    moments = empirical_moments(post)
    row = {
        "T": chan.transmissivity, "W": "", "V": proto.modulation_variance,
        "d": d, "eps": config.excess_noise, "beta": config.beta,
        "sigma": config.sigma, "strategy": config.strategy.value,
        "n": config.n_shots, "seed": seed, "rng": RNG_ALGORITHM,
        "schedule": str(config.symbol_schedule),
        "snr": stats.snr, "e_C": stats.e_c,
        "a_d": stats.a_d, "b_d": stats.b_d, "c_d": stats.c_d,
        "a_hat": moments.a_hat, "a_se": moments.a_se,
        "b_hat": moments.b_hat, "b_se": moments.b_se,
        "c_hat": moments.c_hat, "c_se": moments.c_se,
        "e_C_hat": moments.e_c_hat, "e_C_se": moments.e_c_se,
        "mean_bx_hat": float(moments.mean_hat[2]), "mean_bx_se": float(moments.mean_se[2]),
        "mean_by_hat": float(moments.mean_hat[3]), "mean_by_se": float(moments.mean_se[3]),
        "snr_hat": "", "delta_v_hat": "", "error": "",
    }
    if config.disclose_fraction:
        est = estimation_pipeline(batch, config.disclose_fraction)
        row["snr_hat"] = est.snr_hat
        row["delta_v_hat"] = est.delta_v_hat
    if config.shots_output:
        _dump_shots(config, batch, post)
    return row


def _dump_shots(config: RunConfig, batch, post) -> None:
    columns = ["shot", "alice_x", "alice_y", "bob_raw_x", "bob_raw_y",
               "bob_post_x", "bob_post_y", "true_symbol", "decided_symbol"]
    with open(config.shots_output, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for i in range(batch.n_shots):
            writer.writerow([
                i,
                repr(float(batch.alice_outcomes[i, 0])),
                repr(float(batch.alice_outcomes[i, 1])),
                repr(float(batch.bob_outcomes[i, 0])),
                repr(float(batch.bob_outcomes[i, 1])),
                repr(float(post.bob_outcomes[i, 0])),
                repr(float(post.bob_outcomes[i, 1])),
                int(batch.true_symbols[i]),
                int(post.decided_symbols[i]),
            ])


def _simulate(config: RunConfig) -> tuple[list[dict], list[str]]:
    rows, warnings = [], 0
    d_values = config.d_values or [config.modulation_variance]
    for i, d in enumerate(d_values):
        try:
            rows.append(_simulate_row(config, d, config.seed + i))
        except SqccError as exc:
            warnings += 1
            rows.append({"T": config.t_values[0], "d": d, "seed": config.seed + i,
                         "error": str(exc)})
    if warnings:
        print(f"warning: {warnings} row(s) failed and were flagged", file=sys.stderr)
    return rows, _SIM_COLUMNS


_VALIDATE_COLUMNS = (["d", "n", "seed", "rng", "V", "T", "eps",
                  "snr", "e_C", "a_d", "b_d", "c_d",
                  "a_hat", "a_se", "b_hat", "b_se", "c_hat", "c_se",
                  "e_C_hat", "e_C_se",
                  "a_pass", "b_pass", "c_pass", "e_C_pass", "pass"])


def _validate_fig2(config: RunConfig) -> tuple[list[dict], list[str]]:
    """Analytic vs simulated postprocessed moments on the reference sweep.

    Fixed first-symbol schedule: the analytic moments describe a single
    classical sub-ensemble, and by symmetry every sub-ensemble matches.
    """
    v, t, eps = 5.0, 0.1, 0.05
    chan = ChannelParams(t, eps)
    rows = []
    for i, d in enumerate(config.d_values or [float(x) for x in range(0, 21, 2)]):
        proto = ProtocolParams(v, d, config.beta)
        stats = postprocess_stats(proto, chan)
        batch = sample_joint(proto, chan, 1, config.n_shots, config.seed + i)
        post = discriminate_and_redisplace(batch, proto, chan)
        m = empirical_moments(post)
        binom_se = math.sqrt(max(stats.e_c * (1.0 - stats.e_c), 1e-12)
                             / (2 * config.n_shots))
        checks = {
            "a_pass": abs(m.a_hat - stats.a_d) <= 5.0 * m.a_se,
            "b_pass": abs(m.b_hat - stats.b_d) <= 5.0 * m.b_se,
            "c_pass": abs(m.c_hat - stats.c_d) <= 5.0 * m.c_se,
            "e_C_pass": abs(m.e_c_hat - stats.e_c) <= 5.0 * binom_se,
        }
        rows.append({
            "d": d, "n": config.n_shots, "seed": config.seed + i,
            "rng": RNG_ALGORITHM, "V": v, "T": t, "eps": eps,
            "snr": stats.snr, "e_C": stats.e_c,
            "a_d": stats.a_d, "b_d": stats.b_d, "c_d": stats.c_d,
            "a_hat": m.a_hat, "a_se": m.a_se,
            "b_hat": m.b_hat, "b_se": m.b_se,
            "c_hat": m.c_hat, "c_se": m.c_se,
            "e_C_hat": m.e_c_hat, "e_C_se": m.e_c_se,
            **checks,
            "pass": all(checks.values()),
        })
    return rows, _VALIDATE_COLUMNS


def _security(config: RunConfig, block_size: float) -> SecurityParams:
    if config.security is not None:
        sec = config.security
        return SecurityParams(
            block_size=block_size,
            frame_success=sec.frame_success,
            discretization_bits=sec.discretization_bits,
            eps_pe=sec.eps_pe, eps_s=sec.eps_s, eps_h=sec.eps_h,
            eps_ent=sec.eps_ent, eps_qrng=sec.eps_qrng,
            eps_ir=sec.eps_ir, eps_cal=sec.eps_cal,
        )
    return SecurityParams(block_size=block_size)


def run(config: RunConfig) -> int:
    """Execute one command; writes the artifact file and returns the exit code."""
    handlers = {
        "sweep-asymptotic": _sweep_asymptotic,
        "sweep-finite": _sweep_finite,
        "optimize": _optimize,
        "simulate": _simulate,
        "validate-fig2": _validate_fig2,
        "compare-baseline": _compare_baseline,
    }
    rows, columns = handlers[config.command](config)
    path = _write_rows(rows, columns, config)
    print(f"wrote {len(rows)} row(s) to {path}")
    return 0


def _parse_t_grid(descriptor: str) -> list[float]:
    """Parse 'log:lo:hi:n' or 'lin:lo:hi:n' grid descriptors."""
    parts = descriptor.split(":")
    if len(parts) != 4 or parts[0] not in ("log", "lin"):
        raise argparse.ArgumentTypeError(
            f"grid must look like log:0.01:0.9:50, got {descriptor!r}"
        )
    kind, lo, hi, n = parts[0], float(parts[1]), float(parts[2]), int(parts[3])
    if not (0.0 < lo < hi) or n < 2:
        raise argparse.ArgumentTypeError(f"invalid grid bounds in {descriptor!r}")
    if kind == "log":
        return list(np.geomspace(lo, hi, n))
    return list(np.linspace(lo, hi, n))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqccqkd",
        description="Secret-key rates and Monte Carlo validation for "
                    "simultaneous quantum-classical CV-QKD.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_w: bool = True):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--T", type=float, nargs="+", default=None,
                           help="transmissivity value(s)")
        group.add_argument("--db", type=float, nargs="+", default=None,
                           help="attenuation value(s) in dB (converted to T)")
        group.add_argument("--T-grid", dest="t_grid", type=_parse_t_grid,
                           default=None, help="grid descriptor log:lo:hi:n")
        if with_w:
            p.add_argument("--W", type=float, nargs="+", default=None,
                           help="classical QoS bit-error threshold(s)")
        p.add_argument("--eps", type=float, default=None, help="channel excess noise")
        p.add_argument("--beta", type=float, default=None,
                       help="reconciliation efficiency")
        p.add_argument("--sigma", type=float, default=None,
                       help="phase-noise factor (0 disables)")
        p.add_argument("--strategy", choices=["b-preserving", "c-preserving"],
                       default=None)
        p.add_argument("--mi-double", action="store_true", default=None,
                       help="double the mutual information (dual-quadrature count)")
        p.add_argument("--config", default=None,
                       help="JSON file with flat key/value defaults")
        p.add_argument("--output", default=None, help="artifact file path")
        p.add_argument("--format", dest="fmt", choices=["csv", "json"], default=None)

    p = sub.add_parser("sweep-asymptotic", help="asymptotic rates over a grid")
    common(p)
    p.add_argument("--V", type=float, default=None, help="fixed modulation variance")
    p.add_argument("--optimize-v", action="store_true", default=None)

    p = sub.add_parser("sweep-finite", help="finite-block rates over a grid")
    common(p)
    p.add_argument("--V", type=float, default=None)
    p.add_argument("--optimize-v", action="store_true", default=None)
    p.add_argument("--N", type=float, nargs="+", default=None, help="block size(s)")
    _security_flags(p)

    p = sub.add_parser("optimize", help="maximise the rate over V at one point")
    common(p)
    p.add_argument("--N", type=float, nargs="+", default=None,
                   help="optional block size (finite-key objective)")
    _security_flags(p)

    p = sub.add_parser("simulate", help="Monte Carlo moments at given displacement(s)")
    common(p, with_w=False)
    p.add_argument("--V", type=float, default=None)
    p.add_argument("--d", type=float, nargs="+", default=None)
    p.add_argument("--n", type=int, default=None, help="shots per point")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--symbol", default=None,
                   help="'uniform-random' or a fixed index 1..4")
    p.add_argument("--disclose", type=float, default=None,
                   help="run the estimation pipeline with this disclosed fraction")
    p.add_argument("--shots-output", default=None,
                   help="also dump per-shot scatter data to this CSV")

    p = sub.add_parser("validate-fig2",
                       help="analytic vs empirical moments on the reference sweep")
    p.add_argument("--n", type=int, default=None, help="shots per displacement")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--d", type=float, nargs="+", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--format", dest="fmt", choices=["csv", "json"], default=None)

    p = sub.add_parser("compare-baseline",
                       help="optimised rate vs the prior coupling model")
    common(p)
    return parser


def _security_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p-f", dest="p_f", type=float, default=None,
                   help="frame success probability")
    p.add_argument("--d-rx", dest="d_rx", type=int, default=None,
                   help="discretization bits")
    for name in ("eps-pe", "eps-s", "eps-h", "eps-ent", "eps-qrng",
                 "eps-ir", "eps-cal"):
        p.add_argument(f"--{name}", dest=name.replace("-", "_"), type=float,
                       default=None)


def _merge(args: argparse.Namespace) -> RunConfig:
    """CLI flags override config-file values, which override built-in defaults."""
    raw = vars(args)
    file_values: dict = {}
    if raw.get("config"):
        with open(raw["config"]) as fh:
            file_values = json.load(fh)
        if not isinstance(file_values, dict):
            raise DomainError("config file must hold a flat JSON object")

    def pick(key: str, default, cast=None):
        value = raw.get(key)
        if value is None:
            value = file_values.get(key, default)
        if cast is not None and value is not None:
            value = cast(value)
        return value

    t_values = pick("T", None)
    db_values = pick("db", None)
    t_grid = pick("t_grid", None)
    if isinstance(t_grid, str):
        t_grid = _parse_t_grid(t_grid)
    chosen = [v for v in (t_values, db_values, t_grid) if v]
    if len(chosen) > 1:
        raise DomainError("T, db and T-grid are mutually exclusive")
    if db_values:
        ts = [attenuation_db_to_transmissivity(v) for v in db_values]
    elif t_grid:
        ts = list(t_grid)
    elif t_values:
        ts = list(t_values)
    else:
        ts = [0.1]

    symbol = pick("symbol", "uniform-random")
    if isinstance(symbol, str) and symbol.isdigit():
        symbol = int(symbol)
    if symbol != "uniform-random" and symbol not in (1, 2, 3, 4):
        raise DomainError(f"symbol must be 'uniform-random' or 1..4, got {symbol!r}")

    disclose = pick("disclose", None, lambda v: float(v) if v is not None else None)
    if disclose is not None and not 0.0 < disclose < 1.0:
        raise DomainError(f"disclose fraction must be in (0, 1), got {disclose}")

    strategy = RenormStrategy(pick("strategy", "b-preserving"))
    block_sizes = pick("N", None) or []

    sec = None
    if any(raw.get(k) is not None or k in file_values
           for k in ("p_f", "d_rx", "eps_pe", "eps_s", "eps_h", "eps_ent",
                     "eps_qrng", "eps_ir", "eps_cal")):
        sec = SecurityParams(
            block_size=block_sizes[0] if block_sizes else 1e8,
            frame_success=pick("p_f", 0.9964, float),
            discretization_bits=pick("d_rx", 6, int),
            eps_pe=pick("eps_pe", 1e-10, float),
            eps_s=pick("eps_s", 1e-10, float),
            eps_h=pick("eps_h", 1e-10, float),
            eps_ent=pick("eps_ent", 1e-10, float),
            eps_qrng=pick("eps_qrng", 1e-10, float),
            eps_ir=pick("eps_ir", 1e-10, float),
            eps_cal=pick("eps_cal", 1e-10, float),
        )

    t_list = [float(t) for t in ts]
    w_list = [float(w) for w in (pick("W", None) or [0.5])]
    eps = pick("eps", 0.05, float)
    beta = pick("beta", 0.95, float)
    sigma = pick("sigma", 0.0, float)
    v = pick("V", 5.0, float)
    # run the domain validators now so bad values exit as usage errors
    for t in t_list:
        ChannelParams(t, eps, sigma)
    ProtocolParams(v, 0.0, beta)
    for w in w_list:
        if not 0.0 < w <= 0.5:
            raise DomainError(f"W must be in (0, 0.5], got {w}")

    return RunConfig(
        command=raw["command"],
        t_values=t_list,
        w_values=w_list,
        excess_noise=eps,
        beta=beta,
        sigma=sigma,
        strategy=strategy,
        modulation_variance=v,
        optimize_v=bool(pick("optimize_v", False)),
        mi_double=bool(pick("mi_double", False)),
        block_sizes=[float(n) for n in block_sizes],
        security=sec,
        d_values=[float(d) for d in (pick("d", None) or [])],
        n_shots=pick("n", 100_000, int),
        seed=pick("seed", 42, int),
        symbol_schedule=symbol,
        disclose_fraction=disclose,
        output=pick("output", "") or "",
        fmt=pick("fmt", "csv"),
        shots_output=pick("shots_output", "") or "",
    )


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _merge(args)
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        parser.error(str(exc))  # exits 2
    try:
        return run(config)
    except SqccError as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
