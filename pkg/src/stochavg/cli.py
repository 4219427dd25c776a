"""Command-line front end: check, bound, simulate, sweep.

Configs are JSON; outputs are CSV plus a small JSON manifest, so results
can be plotted with any external tool.  The exit code contract is part of
the interface: 0 = ok, 1 = malformed config, 2 = hypotheses certifiably
violated, 3 = undecidable, 4 = a trial diverged.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    bound_inputs,
    declared_envelope,
    empirical_var_xstar,
    full_report,
    rate_functional,
)
from .engine import (
    SimConfig,
    run_ensemble,
    sim_config_from_dict,
    sim_config_to_dict,
    thread_count,
)
from .errors import (
    ConfigError,
    DivergenceError,
    InsufficientTrials,
    StochAvgError,
)
from .flows import (
    DETERMINISTIC,
    IID,
    MARKOV,
    bernoulli_edge_failure_flow,
    certify,
    deterministic_flow,
    flow_to_dict,
    joint_connectivity_theta,
)
from .gain import gain_at, validate as validate_gain
from .graph import (
    algebraic_connectivity,
    complete_graph,
    laplacian,
    ring_graph,
    symmetrized_laplacian,
)
from .noise import AFFINE, ADDITIVE, MULTIPLICATIVE

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VIOLATED = 2
EXIT_UNDECIDABLE = 3
EXIT_DIVERGED = 4

_SWEEPABLE = ("n", "sigma", "b", "gamma", "a")
_CHECK_TOL = 1e-10

YES, NO, UNKNOWN = "yes", "no", "unknown"


# -- config loading ---------------------------------------------------------

def _family_flow(spec: dict, n: int):
    known = {"family", "weight", "directed", "bernoulli_p"}
    extra = set(spec) - known
    if extra:
        raise ConfigError(f"flow family spec has unknown keys {sorted(extra)}")
    family = spec["family"]
    weight = float(spec.get("weight", 1.0))
    directed = bool(spec.get("directed", False))
    if family == "ring":
        base = ring_graph(n, weight=weight, directed=directed)
    elif family == "complete":
        base = complete_graph(n, weight=weight)
    else:
        raise ConfigError(f"unknown flow family {family!r} (use ring or complete)")
    if "bernoulli_p" in spec:
        return bernoulli_edge_failure_flow(base, float(spec["bernoulli_p"]))
    return deterministic_flow([base])


def build_config(raw: dict) -> SimConfig:
    """Materialize a raw config dict (family sugar allowed) into a SimConfig."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    raw = dict(raw)
    flow_spec = raw.get("flow")
    if isinstance(flow_spec, dict) and "family" in flow_spec:
        if "n" not in raw:
            raise ConfigError("flow family form needs the top-level key 'n'")
        raw["flow"] = flow_to_dict(_family_flow(flow_spec, int(raw["n"])))
    return sim_config_from_dict(raw)


def canonical_config_json(cfg: SimConfig) -> str:
    """Fully explicit, key-sorted, whitespace-free config JSON."""
    return json.dumps(sim_config_to_dict(cfg), sort_keys=True, separators=(",", ":"))


def config_hash(cfg: SimConfig) -> str:
    return hashlib.sha256(canonical_config_json(cfg).encode("utf-8")).hexdigest()


def _load_raw(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config {path} is not valid JSON "
            f"(line {exc.lineno}, column {exc.colno}: {exc.msg})"
        ) from exc


def _apply_overrides(raw: dict, args) -> dict:
    raw = dict(raw)
    if getattr(args, "seed", None) is not None:
        raw["base_seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        raw["trials"] = args.trials
    if getattr(args, "horizon", None) is not None:
        raw["horizon"] = args.horizon
    if getattr(args, "stride", None) is not None:
        raw["record_stride"] = args.stride
    return raw


# -- hypothesis evaluation --------------------------------------------------

@dataclass(frozen=True)
class RouteStatus:
    name: str
    applicable: bool
    items: tuple[tuple[str, str, str], ...]  # (label, yes/no/unknown, detail)

    @property
    def satisfied(self) -> bool:
        return self.applicable and all(s == YES for _, s, _ in self.items)

    @property
    def violated(self) -> bool:
        return self.applicable and any(s == NO for _, s, _ in self.items)


@dataclass(frozen=True)
class CheckReport:
    certificate: object
    h_star: int
    connectivity_status: str
    routes: tuple[RouteStatus, ...]
    sigma: float
    b: float
    envelope_certifiable: bool
    exit_code: int


def _connectivity_scan(flow, tol=_CHECK_TOL):
    """Search window lengths for positive joint connectivity.

    Returns (h, theta, status).  When every scanned window fails, the
    verdict depends on the union of the support: with nonnegative weights
    a disconnected union rules out every window of every length, which is
    a definitive violation; otherwise the scan is inconclusive.
    """
    if flow.kind == IID:
        h_list = [1]  # theta grows linearly in h: h=1 decides the sign
    elif flow.kind == DETERMINISTIC:
        h_list = list(range(1, flow.support_size + 1))
    else:
        h_list = list(range(1, max(4, 2 * flow.support_size) + 1))
    best_h, best_theta = h_list[-1], 0.0
    for h in h_list:
        theta = joint_connectivity_theta(flow, h)
        if theta > tol:
            return h, theta, YES
        if theta > best_theta:
            best_h, best_theta = h, theta
    union = sum(
        symmetrized_laplacian(laplacian(g)) for g in flow.graphs
    )
    nonneg = all(float(g.adjacency.min()) >= 0.0 for g in flow.graphs)
    if nonneg and algebraic_connectivity(union, tol) <= tol:
        return best_h, best_theta, NO
    return best_h, best_theta, UNKNOWN


def _noise_item(model) -> tuple[str, str]:
    builtin = model.coupling is None
    if builtin:
        return YES, f"{model.kind} family, beta={model.beta:.6g}"
    return UNKNOWN, "custom coupling: martingale property not provable"


def evaluate_config(cfg: SimConfig) -> CheckReport:
    """Run every certifier and decide the exit code."""
    h_star, theta_star, conn_status = _connectivity_scan(cfg.flow)
    cert = certify(cfg.flow, h_star)
    flags = validate_gain(cfg.gain)
    sigma, b, certifiable = declared_envelope(cfg.intensities)

    balance_item = (
        "conditional means balanced and nonnegative",
        YES if cert.conditionally_balanced else NO,
        "",
    )
    gain_item = (
        "gain schedule flags",
        YES if flags.all_satisfied else NO,
        f"persistent={flags.persistent} square_summable={flags.square_summable} "
        f"vanishing={flags.vanishing} shift_comparable={flags.shift_comparable}",
    )
    noise_status, noise_detail = _noise_item(cfg.noise)
    noise_item = ("noise martingale family", noise_status, noise_detail)
    envelope_item = (
        "intensity envelopes",
        YES if certifiable else UNKNOWN,
        f"sigma_max={sigma:.6g} b_max={b:.6g}"
        + ("" if certifiable else " (custom function: probed, not proven)"),
    )
    shared = [balance_item, gain_item, noise_item, envelope_item]

    conn_item = (
        "joint connectivity over a window",
        conn_status,
        f"theta={theta_star:.6g} at h={h_star}",
    )
    routes = [
        RouteStatus(
            "balanced_connective", True, tuple(shared + [conn_item])
        )
    ]

    if cfg.flow.kind == MARKOV:
        items = list(shared)
        items.append(
            (
                "uniformly ergodic chain",
                YES if cert.uniformly_ergodic else NO,
                "",
            )
        )
        items.append(
            (
                "unique stationary distribution",
                YES if cert.pi is not None else NO,
                "" if cert.pi is None else np.array2string(cert.pi, precision=6),
            )
        )
        tree = cert.mean_has_spanning_tree
        items.append(
            (
                "stationary mean graph has a spanning tree",
                UNKNOWN if tree is None else (YES if tree else NO),
                "",
            )
        )
        routes.append(RouteStatus("ergodic_markov", True, tuple(items)))
    else:
        routes.append(RouteStatus("ergodic_markov", False, ()))

    if cfg.flow.kind == IID:
        items = list(shared)
        lam = cert.lambda2_mean or 0.0
        items.append(
            (
                "mean symmetrized graph connected",
                YES if lam > _CHECK_TOL else NO,
                f"lambda2_mean={lam:.6g}",
            )
        )
        c0 = gain_at(cfg.gain, 0)
        load = cert.l2_moment + 4.0 * sigma**2 * cfg.noise.beta * cert.rho1_bar
        threshold = (2.0 * lam / load) if load > 0 else float("inf")
        items.append(
            (
                "initial gain below small-gain threshold",
                YES if c0 < threshold else NO,
                f"c0={c0:.6g} threshold={threshold:.6g}",
            )
        )
        routes.append(RouteStatus("iid_small_gain", True, tuple(items)))
    else:
        routes.append(RouteStatus("iid_small_gain", False, ()))

    applicable = [r for r in routes if r.applicable]
    if any(r.satisfied for r in applicable):
        code = EXIT_OK
    elif any(not r.violated for r in applicable):
        code = EXIT_UNDECIDABLE
    else:
        code = EXIT_VIOLATED
    return CheckReport(
        certificate=cert,
        h_star=h_star,
        connectivity_status=conn_status,
        routes=tuple(routes),
        sigma=sigma,
        b=b,
        envelope_certifiable=certifiable,
        exit_code=code,
    )


def _print_check_report(cfg: SimConfig, report: CheckReport, out=None):
    cert = report.certificate
    w = (out if out is not None else sys.stdout).write
    w(f"flow certificate (kind={cert.kind}, n={cert.n}, window h={cert.h}):\n")
    w(f"  conditionally balanced: {cert.conditionally_balanced}\n")
    w(f"  joint connectivity theta: {cert.theta:.9g}\n")
    w(
        "  moment envelopes: "
        f"rho0={cert.rho0:.9g} rho1={cert.rho1:.9g} rho2={cert.rho2:.9g}\n"
    )
    w(f"  class memberships: {', '.join(sorted(cert.class_memberships)) or '(none)'}\n")
    w(f"  uniformly ergodic: {cert.uniformly_ergodic}\n")
    w(f"  mean graph has spanning tree: {cert.mean_has_spanning_tree}\n")
    if cert.pi is not None:
        w(f"  stationary distribution: {np.array2string(cert.pi, precision=6)}\n")
    if cert.lambda2_mean is not None:
        w(
            "  one-shot stats: "
            f"lambda2_mean={cert.lambda2_mean:.9g} l2_moment={cert.l2_moment:.9g} "
            f"rho1_bar={cert.rho1_bar:.9g} rho2_bar={cert.rho2_bar:.9g}\n"
        )
    flags = validate_gain(cfg.gain)
    w(
        f"gain schedule: a={cfg.gain.a:.9g} k0={cfg.gain.k0:.9g} "
        f"gamma={cfg.gain.gamma:.9g}\n"
    )
    w(
        f"  persistent={flags.persistent} square_summable={flags.square_summable} "
        f"vanishing={flags.vanishing} shift_comparable={flags.shift_comparable}\n"
    )
    w(f"noise model: {cfg.noise.kind} beta={cfg.noise.beta:.9g}\n")
    w(
        f"intensity envelopes: sigma_max={report.sigma:.9g} b_max={report.b:.9g} "
        f"affine_family={report.envelope_certifiable}\n"
    )
    for route in report.routes:
        if not route.applicable:
            w(f"route {route.name}: not applicable\n")
            continue
        if route.satisfied:
            status = "SATISFIED"
        elif route.violated:
            status = "VIOLATED"
        else:
            status = "UNDECIDED"
        w(f"route {route.name}: {status}\n")
        for label, s, detail in route.items:
            suffix = f" ({detail})" if detail else ""
            w(f"  - {label}: {s}{suffix}\n")
    verdict = {
        EXIT_OK: "hypotheses satisfied",
        EXIT_VIOLATED: "hypotheses violated",
        EXIT_UNDECIDABLE: "undecidable",
    }[report.exit_code]
    w(f"verdict: {verdict} (exit {report.exit_code})\n")


# -- bound assembly ---------------------------------------------------------

def _bound_report(cfg: SimConfig, report: CheckReport):
    inputs = bound_inputs(
        report.certificate,
        report.sigma,
        report.b,
        cfg.noise.beta,
        cfg.x0,
        cfg.gain,
    )
    return full_report(inputs, c0=gain_at(cfg.gain, 0))


def _bound_to_dict(b) -> dict:
    return {
        "q_v": b.q_v,
        "q_x": b.q_x,
        "term_additive": b.term_additive,
        "term_multiplicative": b.term_multiplicative,
        "term_unbalance": b.term_unbalance,
        "var_bound_thm1": b.var_bound_thm1,
        "var_bound_remark6": b.var_bound_remark6,
        "var_bound_thm4": b.var_bound_thm4,
        "small_gain_ok": b.small_gain_ok,
        "c_tilde_bound": b.c_tilde_bound,
    }


# -- CSV helpers ------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: Path, lines: list[str]):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _manifest(out_dir: Path, cfg: SimConfig, command: str, outputs: list[str]):
    payload = {
        "command": command,
        "config_hash": config_hash(cfg),
        "base_seed": cfg.base_seed,
        "version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": outputs,
        "threads": thread_count(cfg.trials),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", "utf-8")
    return path


def _summary_lines(cfg: SimConfig, stats) -> list[str]:
    lines = ["k,mean_V,se_V"]
    for k, mv, sv in zip(stats.times, stats.mean_spread, stats.se_spread):
        lines.append(f"{int(k)},{_fmt(mv)},{_fmt(sv)}")

    try:
        est = empirical_var_xstar(stats)
        mean_xstar, se_mean, var_xstar = est.mean, est.se_mean, est.variance
    except InsufficientTrials:
        mean_xstar, se_mean, var_xstar = stats.mean_final_centroid, 0.0, None

    thm1 = thm4 = None
    try:
        report = evaluate_config(cfg)
        if report.routes[0].satisfied:
            bounds = _bound_report(cfg, report)
            thm1 = bounds.var_bound_thm1
            thm4 = bounds.var_bound_thm4
    except StochAvgError:
        pass

    rate_end = None
    if cfg.record_stride == 1 and cfg.horizon >= 1 and stats.trial_results:
        rates = [rate_functional(t, cfg.gain)[-1] for t in stats.trial_results]
        rate_end = float(np.mean(rates))

    header = ["mean_xstar", "se_mean", "var_xstar", "var_bound_thm1"]
    row = [mean_xstar, se_mean, var_xstar, thm1]
    if cfg.flow.kind == IID:
        header.append("var_bound_thm4")
        row.append(thm4)
    header.append("rate_r_at_end")
    row.append(rate_end)
    lines.append(",".join(header))
    lines.append(",".join(_fmt(v) for v in row))
    return lines


def _trajectory_lines(cfg: SimConfig, stats, full_state: bool) -> list[str]:
    header = "trial,k,V,centroid"
    if full_state:
        header += "," + ",".join(f"x_{i}" for i in range(cfg.n))
    lines = [header]
    for trial in stats.trial_results:
        for r, k in enumerate(trial.times):
            row = [
                str(trial.trial_index),
                str(int(k)),
                _fmt(trial.spread[r]),
                _fmt(trial.centroid[r]),
            ]
            if full_state:
                row.extend(_fmt(v) for v in trial.states[r])
            lines.append(",".join(row))
    return lines


# -- subcommands ------------------------------------------------------------

def cmd_check(args) -> int:
    cfg = build_config(_apply_overrides(_load_raw(args.config), args))
    report = evaluate_config(cfg)
    _print_check_report(cfg, report)
    return report.exit_code


def cmd_bound(args) -> int:
    cfg = build_config(_apply_overrides(_load_raw(args.config), args))
    report = evaluate_config(cfg)
    base = report.routes[0]
    if not base.satisfied:
        _print_check_report(cfg, report)
        return EXIT_VIOLATED if base.violated else EXIT_UNDECIDABLE
    bounds = _bound_report(cfg, report)
    payload = _bound_to_dict(bounds)
    print(json.dumps(payload, sort_keys=True, indent=2))
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "bound.json").write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", "utf-8"
        )
        keys = list(payload)
        _write_csv(
            out_dir / "bound.csv",
            [",".join(keys), ",".join(_fmt(payload[k]) for k in keys)],
        )
        _manifest(out_dir, cfg, "bound", ["bound.json", "bound.csv"])
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = build_config(_apply_overrides(_load_raw(args.config), args))
    try:
        stats = run_ensemble(cfg, keep_trials=True)
    except DivergenceError as exc:
        print(
            f"divergence: trial {exc.trial_index} left the guard region "
            f"at step {exc.step}",
            file=sys.stderr,
        )
        return EXIT_DIVERGED
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    traj = out_dir / "trajectories.csv"
    summ = out_dir / "summary.csv"
    _write_csv(traj, _trajectory_lines(cfg, stats, args.full_state))
    _write_csv(summ, _summary_lines(cfg, stats))
    _manifest(out_dir, cfg, "simulate", ["trajectories.csv", "summary.csv"])
    print(f"trials={cfg.trials} horizon={cfg.horizon} n={cfg.n}")
    print(f"mean_V_final={_fmt(stats.mean_final_spread)}")
    print(f"mean_xstar={_fmt(stats.mean_final_centroid)}")
    print(f"wrote {traj}")
    print(f"wrote {summ}")
    return EXIT_OK


def _parse_sweep(spec: str):
    if "=" not in spec:
        raise ConfigError("sweep spec must look like param=v1,v2,...")
    param, _, values = spec.partition("=")
    param = param.strip()
    if param not in _SWEEPABLE:
        raise ConfigError(
            f"cannot sweep {param!r}; choose one of {', '.join(_SWEEPABLE)}"
        )
    parts = [p.strip() for p in values.split(",") if p.strip()]
    if not parts:
        raise ConfigError("sweep spec has no values")
    if param == "n":
        return param, [int(p) for p in parts]
    return param, [float(p) for p in parts]


def _sweep_variant(raw: dict, param: str, value) -> dict:
    raw = dict(raw)
    if param == "n":
        if not (isinstance(raw.get("x0"), dict)):
            raise ConfigError("sweeping n needs x0 in linspace form")
        if not (isinstance(raw.get("flow"), dict) and "family" in raw["flow"]):
            raise ConfigError("sweeping n needs a flow family (ring or complete)")
        raw["n"] = int(value)
        return raw
    if param in ("sigma", "b"):
        if "intensities" in raw:
            raise ConfigError(
                f"sweeping {param} needs a single shared 'intensity' entry"
            )
        spec = dict(raw.get("intensity", {"form": ADDITIVE, "b": 1.0}))
        form = spec.get("form", AFFINE)
        sigma = float(spec.get("sigma", 0.0)) if form != ADDITIVE else 0.0
        b = float(spec.get("b", 0.0)) if form != MULTIPLICATIVE else 0.0
        if param == "sigma":
            sigma = float(value)
        else:
            b = float(value)
        raw["intensity"] = {"form": AFFINE, "sigma": sigma, "b": b}
        return raw
    spec = dict(raw.get("gain", {}))
    spec[param] = float(value)
    raw["gain"] = spec
    return raw


def cmd_sweep(args) -> int:
    raw = _apply_overrides(_load_raw(args.config), args)
    param, values = _parse_sweep(args.sweep)
    base_cfg = build_config(raw)
    header = (
        "param,value,n,mean_xstar,se_mean,var_xstar,"
        "var_bound_thm1,var_bound_thm4,mean_V_final"
    )
    lines = [header]
    for value in values:
        cfg = build_config(_sweep_variant(raw, param, value))
        try:
            stats = run_ensemble(cfg)
        except DivergenceError as exc:
            print(
                f"divergence at {param}={value}: trial {exc.trial_index}, "
                f"step {exc.step}",
                file=sys.stderr,
            )
            return EXIT_DIVERGED
        try:
            est = empirical_var_xstar(stats)
            mean_xstar, se_mean, var_xstar = est.mean, est.se_mean, est.variance
        except InsufficientTrials:
            mean_xstar, se_mean, var_xstar = stats.mean_final_centroid, 0.0, None
        thm1 = thm4 = None
        try:
            report = evaluate_config(cfg)
            if report.routes[0].satisfied:
                bounds = _bound_report(cfg, report)
                thm1 = bounds.var_bound_thm1
                thm4 = bounds.var_bound_thm4
        except StochAvgError:
            pass
        row = [
            param,
            _fmt(value),
            str(cfg.n),
            _fmt(mean_xstar),
            _fmt(se_mean),
            _fmt(var_xstar),
            _fmt(thm1),
            _fmt(thm4),
            _fmt(stats.mean_final_spread),
        ]
        lines.append(",".join(row))
        print(lines[-1])
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "sweep.csv"
    _write_csv(path, lines)
    _manifest(out_dir, base_cfg, "sweep", ["sweep.csv"])
    print(f"wrote {path}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------

def _add_common(parser, *, out_default=None, sim_flags=False):
    parser.add_argument("--config", required=True, help="path to a JSON config")
    if sim_flags:
        parser.add_argument("--seed", type=int, default=None, help="override base_seed")
        parser.add_argument("--trials", type=int, default=None, help="override trials")
        parser.add_argument("--horizon", type=int, default=None, help="override horizon")
        parser.add_argument(
            "--stride", type=int, default=None, help="override record_stride"
        )
    if out_default is not None:
        parser.add_argument(
            "--out", default=out_default, help="directory for output files"
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochavg",
        description="Distributed averaging under random graphs and noisy links",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="certify hypotheses of a config")
    _add_common(p_check, sim_flags=True)
    p_check.set_defaults(func=cmd_check)

    p_bound = sub.add_parser("bound", help="compute a-priori variance bounds")
    _add_common(p_bound, sim_flags=True)
    p_bound.add_argument("--out", default=None, help="directory for output files")
    p_bound.set_defaults(func=cmd_bound)

    p_sim = sub.add_parser("simulate", help="run the Monte-Carlo ensemble")
    _add_common(p_sim, out_default=".", sim_flags=True)
    p_sim.add_argument(
        "--full-state",
        action="store_true",
        help="write per-agent state columns in trajectories.csv",
    )
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run a one-parameter grid")
    _add_common(p_sweep, out_default=".", sim_flags=True)
    p_sweep.add_argument(
        "--sweep",
        required=True,
        metavar="param=v1,v2,...",
        help=f"grid spec; param is one of {', '.join(_SWEEPABLE)}",
    )
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(
            f"divergence: trial {exc.trial_index} at step {exc.step}",
            file=sys.stderr,
        )
        return EXIT_DIVERGED
    except StochAvgError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
