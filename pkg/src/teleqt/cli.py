"""Command-line harness producing figure data and verification reports.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import capacity as cap
from .gkp import gkp_error_bound, gkp_error_mc, gkp_spacings
from .phase_space import GaussianState, coherent_state
from .protocol import (
    ProtocolParams,
    epr_antisqueezed_variances,
    epr_variances,
    estimate_channel_mc,
    make_generalized_epr,
    teleport_channel,
    teleport_trajectory,
    unconditional_output,
)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

ETA_LIMITS = (0.01, 0.99)
DEFAULT_ETA_RANGE = (0.01, 0.99, 0.01)
DEFAULT_GAIN_RANGE = (0.0, 25.0, 0.1)
DEFAULT_KAPPA_RANGE = (0.5, 1.0, 0.005)
MAX_SEED = 2**64 - 1


class ConfigError(ValueError):
    pass


class NumericalError(RuntimeError):
    pass


# --- helpers ----------------------------------------------------------------


def grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive grid, rounded to the step's decimals to avoid float drift."""
    if step <= 0 or stop < start:
        raise ConfigError(f"bad range {start}:{stop}:{step}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    decimals = max(0, -int(math.floor(math.log10(step))) + 3)
    return np.round(start + step * np.arange(n), decimals)


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def table_json(header: list[str], rows: list[list]) -> dict:
    return {"columns": header, "rows": [[_jsonable(v) for v in r] for r in rows]}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return None if math.isnan(x) else x
    return x


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def write_atomic(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_eta(eta: float, lo: float = 0.0, hi: float = 1.0, closed=False) -> None:
    ok = lo <= eta <= hi if closed else lo < eta < hi
    if not ok:
        raise ConfigError(f"eta={eta} outside allowed range")


def _check_eta_grid(etas) -> None:
    if etas.min() < ETA_LIMITS[0] - 1e-12 or etas.max() > ETA_LIMITS[1] + 1e-12:
        raise ConfigError(f"eta grid must lie within [{ETA_LIMITS[0]}, {ETA_LIMITS[1]}]")


def _params(args) -> ProtocolParams:
    try:
        return ProtocolParams(
            args.eta, float(cap.from_db(args.gain_db)), args.kappa_h, args.kappa_s
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _check_samples(n: int, minimum: int) -> None:
    if n < minimum:
        raise ConfigError(f"--samples must be >= {minimum}")


def gnuplot_script(data_path: str, header: list[str], x: str) -> str:
    xi = header.index(x) + 1
    plots = [
        f"'{data_path}' using {xi}:{i + 1} with lines title '{name}'"
        for i, name in enumerate(header)
        if name != x
    ]
    return (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        f"set xlabel '{x}'\n"
        "plot " + ", \\\n     ".join(plots) + "\n"
    )


# --- commands ---------------------------------------------------------------


def cmd_fig2a(args) -> tuple[list[str], list[list]]:
    etas = grid(*args.eta_range)
    _check_eta_grid(etas)
    header = ["eta", "q_direct", "q_lb_10db", "q_ub_10db", "q_lb_20db", "q_ub_20db"]
    rows = []
    for eta in etas:
        row = [eta, cap.pure_loss_capacity(float(eta))]
        for g_db in (10.0, 20.0):
            b = cap.protocol_rate_bounds(ProtocolParams(float(eta), float(cap.from_db(g_db))))
            row += [b.lower, b.upper]
        rows.append(row)
    return header, rows


def cmd_fig2b(args) -> tuple[list[str], list[list], dict]:
    _check_eta(args.eta, *ETA_LIMITS, closed=True)
    gains = grid(*args.gain_db_range)
    if gains.min() < 0:
        raise ConfigError("gain grid must be >= 0 dB")
    rows = []
    for g_db in gains:
        b = cap.protocol_rate_bounds(ProtocolParams(args.eta, float(cap.from_db(g_db))))
        rows.append([g_db, b.lower, b.upper])
    summary = {
        "eta": args.eta,
        "g_star_db": float(cap.to_db(cap.g_star(args.eta))),
        "g_star_adv_db": float(cap.to_db(cap.g_star_adv(args.eta))),
        "q_direct": cap.pure_loss_capacity(args.eta),
        "slope_bits_per_db": 1.0 / (10.0 * math.log10(2.0)),
    }
    return ["g_db", "q_lb", "q_ub"], rows, summary


def _threshold_or_nan(query) -> tuple[float, float]:
    try:
        return cap.gain_threshold(query), math.nan
    except cap.ThresholdNotFound as exc:
        return math.nan, exc.closest_gain_db


def cmd_fig3(args) -> tuple[list[str], list[list]]:
    etas = grid(*args.eta_range)
    _check_eta_grid(etas)
    header = [
        "eta",
        "thr_pos_lb_db",
        "thr_pos_ub_db",
        "thr_adv_lb_db",
        "thr_adv_ub_db",
        "pos_ub_closest_db",
        "adv_ub_closest_db",
    ]
    rows = []
    for eta in etas:
        eta = float(eta)
        pos_lb, _ = _threshold_or_nan(cap.ThresholdQuery(eta, "positive_rate", "lower"))
        pos_ub, pos_c = _threshold_or_nan(cap.ThresholdQuery(eta, "positive_rate", "upper"))
        adv_lb, _ = _threshold_or_nan(cap.ThresholdQuery(eta, "advantage_over_direct", "lower"))
        adv_ub, adv_c = _threshold_or_nan(
            cap.ThresholdQuery(eta, "advantage_over_direct", "upper")
        )
        if math.isnan(pos_lb) or math.isnan(adv_lb):
            raise NumericalError(f"lower-bound threshold not bracketed at eta={eta}")
        rows.append([eta, pos_lb, pos_ub, adv_lb, adv_ub, pos_c, adv_c])
    return header, rows


def cmd_fig4(args) -> tuple[list[str], list[list]]:
    eta = args.eta
    _check_eta(eta)
    kappas = grid(*args.kappa_range)
    if kappas.min() <= 0 or kappas.max() > 1:
        raise ConfigError("kappa grid must lie within (0, 1]")
    rows = []
    if args.mode == "a":
        gains = grid(*args.gain_db_range)
        for g_db in gains:
            for k in kappas:
                p = ProtocolParams(eta, float(cap.from_db(g_db)), float(k), float(k))
                rows.append([g_db, k, cap.protocol_rate_bounds(p).lower])
        return ["g_db", "kappa", "q_lb"], rows
    gain = float(cap.from_db(args.gain_db))
    for kh in kappas:
        for ks in kappas:
            p = ProtocolParams(eta, gain, float(kh), float(ks))
            rows.append([kh, ks, cap.protocol_rate_bounds(p).lower])
    return ["kappa_h", "kappa_s", "q_lb"], rows


def cmd_teleport_demo(args) -> tuple[dict, GaussianState]:
    params = _params(args)
    _check_samples(args.samples, 100)
    noise = teleport_channel(params)
    mc = estimate_channel_mc(params, args.samples, args.seed)
    expected = np.diag([noise.var_q, noise.var_p])
    z_noise = np.abs(mc["noise_cov"] - expected) / mc["noise_cov_se"]
    z_gain = np.abs(mc["mean_map_gain"] - 1.0) / mc["mean_map_gain_se"]
    ok = bool(np.all(z_noise <= 3.0) and np.all(z_gain <= 3.0))

    inp = coherent_state(args.input_q, args.input_p)
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, len(mc["probe_means"])]))
    shot = teleport_trajectory(params, inp, rng)
    avg = unconditional_output(params, inp)
    report = {
        "params": {
            "eta": params.eta,
            "gain": params.gain,
            "gain_db": args.gain_db,
            "kappa_h": params.kappa_h,
            "kappa_s": params.kappa_s,
        },
        "n_samples": args.samples,
        "seed": args.seed,
        "analytic_channel": {"var_q": noise.var_q, "var_p": noise.var_p},
        "mc_estimate": {
            "noise_cov": mc["noise_cov"],
            "mean_map_gain": mc["mean_map_gain"],
        },
        "std_errors": {
            "noise_cov": mc["noise_cov_se"],
            "mean_map_gain": mc["mean_map_gain_se"],
        },
        "trajectory": {
            "input": [args.input_q, args.input_p],
            "q_tilde": shot.q_tilde,
            "p_tilde": shot.p_tilde,
            "conditional_mean": shot.output.mean,
            "conditional_cov": shot.output.cov,
            "unconditional_cov": avg.cov,
        },
        "pass": ok,
    }
    return report, shot.output


def cmd_gkp(args) -> dict:
    _check_eta(args.eta)
    _check_samples(args.samples, 1000)
    gain = float(cap.from_db(args.gain_db))
    if gain < 1:
        raise ConfigError("gain must be >= 0 dB")
    lat = gkp_spacings(args.eta)
    p_mc, se = gkp_error_mc(args.eta, gain, args.samples, args.seed)
    return {
        "eta": args.eta,
        "gain": gain,
        "l_q": lat.l_q,
        "l_p": lat.l_p,
        "p_bound": gkp_error_bound(args.eta, gain),
        "p_mc": p_mc,
        "std_error": se,
    }


def cmd_epr(args) -> tuple[dict, GaussianState]:
    params = _params(args)
    state = make_generalized_epr(params.eta, params.gain, params.kappa_s)
    vq, vp = epr_variances(state, params.eta)
    aq, ap = epr_antisqueezed_variances(state, params.eta)
    report = {
        "eta": params.eta,
        "gain": params.gain,
        "kappa_s": params.kappa_s,
        "var_q_minus": vq,
        "var_p_plus": vp,
        "var_q_plus": aq,
        "var_p_minus": ap,
    }
    return report, state


# --- argument parsing -------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _add_common(p) -> None:
    p.add_argument("--eta", type=float)
    p.add_argument("--gain-db", type=float)
    p.add_argument("--kappa-h", type=float, default=1.0)
    p.add_argument("--kappa-s", type=float, default=1.0)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--config", default=None, help="flat JSON file of flag values")


def _add_ranges(p) -> None:
    p.add_argument("--eta-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    p.add_argument("--gain-db-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    p.add_argument("--kappa-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    p.add_argument("--gnuplot", default=None, help="also write a gnuplot script here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="teleqt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    defaults = {
        "fig2a": dict(eta_range=DEFAULT_ETA_RANGE, format="csv"),
        "fig2b": dict(eta=0.6, gain_db_range=DEFAULT_GAIN_RANGE, format="csv", summary=None),
        "fig3": dict(eta_range=DEFAULT_ETA_RANGE, format="csv"),
        "fig4": dict(
            eta=0.5,
            gain_db=10.0,
            gain_db_range=DEFAULT_GAIN_RANGE,
            kappa_range=DEFAULT_KAPPA_RANGE,
            mode="b",
            format="csv",
        ),
        "teleport-demo": dict(
            eta=0.6, gain_db=10.0, samples=100_000, input_q=2.0, input_p=3.0, format="json"
        ),
        "gkp": dict(eta=0.5, gain_db=float(cap.to_db(2.0)), samples=1_000_000, format="json"),
        "epr": dict(eta=0.5, gain_db=10.0, format="json"),
    }
    for name, dflt in defaults.items():
        p = sub.add_parser(name)
        _add_common(p)
        if name.startswith("fig"):
            _add_ranges(p)
        if name in ("teleport-demo", "epr"):
            p.add_argument("--dump-state", default=None, help="write the output state as JSON")
        if name == "fig4":
            p.add_argument("--mode", choices=("a", "b"))
        if name == "fig2b":
            p.add_argument("--summary", help="path for the summary JSON (csv output only)")
        if name == "teleport-demo":
            p.add_argument("--input-q", type=float)
            p.add_argument("--input-p", type=float)
        p.set_defaults(**dflt)
    return parser


def _apply_config(parser, argv) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a flat JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    unknown = set(cfg) - set(vars(args)) - {"command"}
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    # re-parse with file values as defaults so explicit flags win
    sub = parser._subparsers._group_actions[0].choices[args.command]
    sub.set_defaults(**{k: v for k, v in cfg.items() if k != "command"})
    args = parser.parse_args(argv)
    if "seed" in cfg:
        try:
            args.seed = _seed(str(args.seed))
        except argparse.ArgumentTypeError as exc:
            raise ConfigError(str(exc)) from None
    return args


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise ConfigError("missing required value(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def run(args) -> None:
    cmd = args.command
    if cmd in ("fig2a", "fig2b", "fig3", "fig4"):
        if cmd == "fig2b":
            header, rows, summary = cmd_fig2b(args)
        else:
            header, rows = {"fig2a": cmd_fig2a, "fig3": cmd_fig3, "fig4": cmd_fig4}[cmd](args)
            summary = None
        if args.format == "json":
            doc = table_json(header, rows)
            if summary is not None:
                doc["summary"] = summary
            write_atomic(args.out, dump_json(doc))
        else:
            write_atomic(args.out, to_csv(header, rows))
            if summary is not None:
                path = args.summary
                if path is None and args.out not in (None, "-"):
                    path = str(Path(args.out).with_suffix(".summary.json"))
                if path is not None:
                    write_atomic(path, dump_json(summary))
        if args.gnuplot:
            if args.out in (None, "-") or args.format != "csv":
                raise ConfigError("--gnuplot needs --out with csv format")
            write_atomic(args.gnuplot, gnuplot_script(args.out, header, header[0]))
        return

    if args.format != "json":
        raise ConfigError(f"{cmd} only supports --format json")
    if cmd == "teleport-demo":
        _require(args, "eta", "gain_db", "samples")
        report, state = cmd_teleport_demo(args)
    elif cmd == "gkp":
        _require(args, "eta", "gain_db", "samples")
        report, state = cmd_gkp(args), None
    else:
        _require(args, "eta", "gain_db")
        report, state = cmd_epr(args)
    write_atomic(args.out, dump_json(report))
    if getattr(args, "dump_state", None) and state is not None:
        write_atomic(args.dump_state, dump_json(state.to_dict()))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        run(args)
    except ConfigError as exc:
        print(f"teleqt: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, cap.ThresholdNotFound, AssertionError, FloatingPointError) as exc:
        print(f"teleqt: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"teleqt: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BrokenPipeError:
        # reader closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return 0


if __name__ == "__main__":
    sys.exit(main())
