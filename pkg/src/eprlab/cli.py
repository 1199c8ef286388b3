"""Command-line front door: analytic predictions, seeded simulations, CHSH
statistics, and angle sweeps, rendered as a human table, CSV, or JSON.

Angles are degrees at this boundary and radians inside. Every output embeds
the full effective run configuration (including a generated seed), so any
result is reproducible from its own output file. Exit codes: 0 success,
2 usage error, 3 statistical hard failure (an impossible-event cell fired).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import secrets
import sys
from pathlib import Path

from .bell import ChshSettings, chsh, chsh_empirical, chsh_scan
from .core import PhotonCharge, PolarizerSettings, marginals
from .models import (
    ObserverView,
    alignment_probability,
    build_model,
    same_outcome_probability,
)
from .montecarlo import convergence_report, run_trials, to_empirical

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_STATISTICAL = 3

_VIEWS = {"A": ObserverView.A, "B": ObserverView.B, "blind": ObserverView.CHARGE_BLIND}
_CELLS = ("yy", "yn", "ny", "nn")

_REQUIRED = object()


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"cannot parse boolean from {text!r}")


# Converters for values read from a config file; keys mirror the CLI flags.
_CONVERTERS = {
    "model": str,
    "theta_a": float,
    "theta_b": float,
    "r": float,
    "view": str,
    "trials": int,
    "seed": int,
    "workers": int,
    "output": str,
    "out": str,
    "start": float,
    "stop": float,
    "step": float,
    "a": float,
    "a_prime": float,
    "b": float,
    "b_prime": float,
    "scan": float,
    "empirical": _parse_bool,
}


def _load_config_file(path: str) -> dict[str, str]:
    """Flat `key = value` lines; '#' starts a comment; flags override the file."""
    values: dict[str, str] = {}
    for raw_line in Path(path).read_text().splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ValueError(f"bad config line {raw_line!r}: expected 'key = value'")
        if key not in _CONVERTERS:
            raise ValueError(f"unknown config key {key!r}")
        values[key] = value.strip()
    return values


def _resolve(args: argparse.Namespace, defaults: dict[str, object]) -> dict[str, object]:
    """Effective parameters: flag value, else config-file value, else default."""
    file_values = _load_config_file(args.config) if args.config else {}
    effective: dict[str, object] = {}
    for key, default in defaults.items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            effective[key] = flag_value
        elif key in file_values:
            effective[key] = _CONVERTERS[key](file_values[key])
        elif default is _REQUIRED:
            raise ValueError(f"missing required parameter --{key.replace('_', '-')}")
        else:
            effective[key] = default
    return effective


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render_json(records: list[dict], config: dict) -> str:
    return json.dumps({"config": config, "records": records}, indent=2) + "\n"


def _render_csv(records: list[dict], config: dict) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(config) + list(records[0]))
    for record in records:
        writer.writerow([_fmt(v) for v in list(config.values()) + list(record.values())])
    return buffer.getvalue()


def _render_table(records: list[dict], config: dict) -> str:
    lines = [f"eprlab {config['command']}"]
    for key, value in config.items():
        if key != "command":
            lines.append(f"  {key} = {_fmt(value)}")
    lines.append("")
    if len(records) == 1:
        width = max(len(k) for k in records[0])
        for key, value in records[0].items():
            lines.append(f"  {key.ljust(width)}  {_fmt(value)}")
    else:
        columns = list(records[0])
        cells = [[_fmt(r[c]) for c in columns] for r in records]
        widths = [
            max(len(col), *(len(row[i]) for row in cells)) for i, col in enumerate(columns)
        ]
        lines.append("  " + "  ".join(c.ljust(w) for c, w in zip(columns, widths)))
        for row in cells:
            lines.append("  " + "  ".join(v.ljust(w) for v, w in zip(row, widths)))
    lines.append("")
    return "\n".join(lines)


def _emit(records: list[dict], config: dict, output: str, out_path) -> None:
    if output == "json":
        text = _render_json(records, config)
    elif output == "csv":
        text = _render_csv(records, config)
    elif output == "table":
        text = _render_table(records, config)
    else:
        raise ValueError(f"unknown output format {output!r}")
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _distribution_record(dist) -> dict:
    return dict(zip((f"p_{c}" for c in _CELLS), dist.as_tuple()))


def _cmd_predict(args: argparse.Namespace) -> int:
    cfg = _resolve(
        args,
        {
            "model": _REQUIRED,
            "theta_a": 0.0,
            "theta_b": 0.0,
            "r": 0.5,
            "view": "blind",
            "output": "table",
            "out": None,
        },
    )
    if cfg["view"] not in _VIEWS:
        raise ValueError(f"unknown view {cfg['view']!r}")
    model = build_model(cfg["model"], cfg["r"])
    settings = PolarizerSettings.from_degrees(cfg["theta_a"], cfg["theta_b"])
    prediction = model.predict(settings, view=_VIEWS[cfg["view"]])
    marg = marginals(prediction.summed)

    record = _distribution_record(prediction.summed)
    record["p_a_yes"] = marg.p_a_yes
    record["p_b_yes"] = marg.p_b_yes
    record["p_same"] = same_outcome_probability(prediction.summed)
    record["alignment_sq"] = alignment_probability(settings)
    if prediction.per_charge is not None:
        for charge, prefix in ((PhotonCharge.POSITIVE, "pos"), (PhotonCharge.NEGATIVE, "neg")):
            weighted = prediction.per_charge[charge]
            record[f"{prefix}_weight"] = weighted.weight
            for cell, p in zip(_CELLS, weighted.dist.as_tuple()):
                record[f"{prefix}_p_{cell}"] = p

    config = {
        "command": "predict",
        "model": cfg["model"],
        "theta_a": cfg["theta_a"],
        "theta_b": cfg["theta_b"],
        "r": cfg["r"],
        "view": cfg["view"],
        "output": cfg["output"],
    }
    _emit([record], config, cfg["output"], cfg["out"])
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _resolve(
        args,
        {
            "model": _REQUIRED,
            "theta_a": 0.0,
            "theta_b": 0.0,
            "r": 0.5,
            "view": "blind",
            "trials": _REQUIRED,
            "seed": None,
            "workers": 1,
            "output": "table",
            "out": None,
        },
    )
    if cfg["view"] not in _VIEWS:
        raise ValueError(f"unknown view {cfg['view']!r}")
    seed = cfg["seed"] if cfg["seed"] is not None else secrets.randbits(63)
    cfg["seed"] = seed
    model = build_model(cfg["model"], cfg["r"])
    settings = PolarizerSettings.from_degrees(cfg["theta_a"], cfg["theta_b"])
    tally = run_trials(
        model,
        settings,
        cfg["trials"],
        seed,
        view=_VIEWS[cfg["view"]],
        workers=cfg["workers"],
    )
    empirical = to_empirical(tally)
    analytic = model.predict(settings).summed
    report = convergence_report(analytic, empirical)

    record: dict[str, object] = {}
    for cell, count in zip(_CELLS, tally.counts):
        record[f"n_{cell}"] = count
    if tally.per_charge_counts is not None:
        for charge, prefix in ((PhotonCharge.POSITIVE, "pos"), (PhotonCharge.NEGATIVE, "neg")):
            for cell, count in zip(_CELLS, tally.per_charge_counts[charge]):
                record[f"{prefix}_n_{cell}"] = count
    record.update(_distribution_record(empirical.estimates))
    for cell, se in zip(_CELLS, empirical.standard_errors):
        record[f"se_{cell}"] = se
    for cell, p in zip(_CELLS, analytic.as_tuple()):
        record[f"analytic_p_{cell}"] = p
    for cell, z in zip(_CELLS, report.z_scores):
        record[f"z_{cell}"] = z
    record["chi_square"] = report.chi_square
    record["dof"] = report.dof
    record["p_value"] = report.p_value
    record["impossible_event"] = report.has_impossible_event

    config = {
        "command": "simulate",
        "model": cfg["model"],
        "theta_a": cfg["theta_a"],
        "theta_b": cfg["theta_b"],
        "r": cfg["r"],
        "view": cfg["view"],
        "trials": cfg["trials"],
        "seed": seed,
        "workers": cfg["workers"],
        "output": cfg["output"],
    }
    _emit([record], config, cfg["output"], cfg["out"])
    return EXIT_STATISTICAL if report.has_impossible_event else EXIT_OK


def _signs_text(signs) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


def _cmd_chsh(args: argparse.Namespace) -> int:
    cfg = _resolve(
        args,
        {
            "model": _REQUIRED,
            "r": 0.5,
            "a": None,
            "a_prime": None,
            "b": None,
            "b_prime": None,
            "scan": None,
            "empirical": None,
            "trials": None,
            "seed": None,
            "output": "table",
            "out": None,
        },
    )
    model = build_model(cfg["model"], cfg["r"])

    if cfg["scan"] is not None:
        result = chsh_scan(model, cfg["scan"])
        config = {
            "command": "chsh",
            "model": cfg["model"],
            "r": cfg["r"],
            "scan": cfg["scan"],
            "output": cfg["output"],
        }
    else:
        four = (cfg["a"], cfg["a_prime"], cfg["b"], cfg["b_prime"])
        if any(v is None for v in four):
            raise ValueError("chsh needs --a, --a-prime, --b and --b-prime, or --scan")
        result = chsh(model, ChshSettings.from_degrees(*four))
        config = {
            "command": "chsh",
            "model": cfg["model"],
            "r": cfg["r"],
            "a": cfg["a"],
            "a_prime": cfg["a_prime"],
            "b": cfg["b"],
            "b_prime": cfg["b_prime"],
            "output": cfg["output"],
        }

    record = {
        "a": result.settings.a.degrees,
        "a_prime": result.settings.a_prime.degrees,
        "b": result.settings.b.degrees,
        "b_prime": result.settings.b_prime.degrees,
        "e_ab": result.correlations[0],
        "e_ab_prime": result.correlations[1],
        "e_a_prime_b": result.correlations[2],
        "e_a_prime_b_prime": result.correlations[3],
        "signs": _signs_text(result.signs),
        "s": result.s_value,
    }

    if cfg["empirical"]:
        if cfg["scan"] is not None:
            raise ValueError("--empirical applies to fixed settings, not --scan")
        if cfg["trials"] is None:
            raise ValueError("--empirical needs --trials")
        seed = cfg["seed"] if cfg["seed"] is not None else secrets.randbits(63)
        config["trials"] = cfg["trials"]
        config["seed"] = seed
        estimate = chsh_empirical(model, result.settings, cfg["trials"], seed)
        for name, value in zip(
            ("e_ab", "e_ab_prime", "e_a_prime_b", "e_a_prime_b_prime"),
            estimate.correlations,
        ):
            record[f"{name}_empirical"] = value
        record["s_empirical"] = estimate.s_value
        record["s_standard_error"] = estimate.s_standard_error

    _emit([record], config, cfg["output"], cfg["out"])
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    from .bell import correlation  # local import keeps the module graph flat

    cfg = _resolve(
        args,
        {
            "model": _REQUIRED,
            "theta_b": 0.0,
            "r": 0.5,
            "start": _REQUIRED,
            "stop": _REQUIRED,
            "step": _REQUIRED,
            "output": "csv",
            "out": None,
        },
    )
    if cfg["step"] <= 0.0:
        raise ValueError("sweep step must be positive")
    if cfg["stop"] < cfg["start"]:
        raise ValueError("empty sweep range: stop is below start")
    model = build_model(cfg["model"], cfg["r"])

    count = int(math.floor((cfg["stop"] - cfg["start"]) / cfg["step"] + 1e-9)) + 1
    records = []
    for k in range(count):
        theta_a = cfg["start"] + k * cfg["step"]
        settings = PolarizerSettings.from_degrees(theta_a, cfg["theta_b"])
        summed = model.predict(settings).summed
        record = {"theta_a": theta_a}
        record.update(_distribution_record(summed))
        record["correlation"] = correlation(summed)
        records.append(record)

    config = {
        "command": "sweep",
        "model": cfg["model"],
        "theta_b": cfg["theta_b"],
        "r": cfg["r"],
        "start": cfg["start"],
        "stop": cfg["stop"],
        "step": cfg["step"],
        "output": cfg["output"],
    }
    _emit(records, config, cfg["output"], cfg["out"])
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=("qm", "balls", "aniso", "lhv"))
    parser.add_argument("--r", type=float, help="anisotropy exponent (aniso only)")
    parser.add_argument("--output", choices=("table", "csv", "json"))
    parser.add_argument("--out", metavar="PATH", help="write output to a file")
    parser.add_argument("--config", metavar="PATH", help="flat key = value config file")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eprlab",
        description="Paired-polarizer correlation lab: quantum, hidden-variable, "
        "balls-and-boxes, and anisotropic-spacetime accounts side by side.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="analytic joint distribution and marginals")
    _add_common(p)
    p.add_argument("--theta-a", type=float, dest="theta_a", help="degrees")
    p.add_argument("--theta-b", type=float, dest="theta_b", help="degrees")
    p.add_argument("--view", choices=("A", "B", "blind"))
    p.set_defaults(handler=_cmd_predict)

    p = sub.add_parser("simulate", help="seeded trials with convergence diagnostics")
    _add_common(p)
    p.add_argument("--theta-a", type=float, dest="theta_a", help="degrees")
    p.add_argument("--theta-b", type=float, dest="theta_b", help="degrees")
    p.add_argument("--view", choices=("A", "B", "blind"))
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="omit to generate one (it is printed)")
    p.add_argument("--workers", type=int, help="partition count; never changes results")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("chsh", help="CHSH statistic at four settings, or a grid scan")
    _add_common(p)
    p.add_argument("--a", type=float, help="degrees")
    p.add_argument("--a-prime", type=float, dest="a_prime", help="degrees")
    p.add_argument("--b", type=float, help="degrees")
    p.add_argument("--b-prime", type=float, dest="b_prime", help="degrees")
    p.add_argument("--scan", type=float, metavar="RES", help="grid resolution in degrees")
    p.add_argument("--empirical", action="store_true", default=None)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=_cmd_chsh)

    p = sub.add_parser("sweep", help="distribution series over a theta_a range")
    _add_common(p)
    p.add_argument("--theta-b", type=float, dest="theta_b", help="degrees")
    p.add_argument("--start", type=float, help="degrees")
    p.add_argument("--stop", type=float, help="degrees")
    p.add_argument("--step", type=float, help="degrees")
    p.set_defaults(handler=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
