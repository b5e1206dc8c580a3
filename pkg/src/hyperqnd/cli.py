"""Command-line front end.

Subcommands emit data tables (CSV or JSON):

    hyperqnd epp               fidelity and yield versus purification rounds
    hyperqnd ecp               concentration success probability versus rounds
    hyperqnd qnd-fidelity      QND fidelities from the cavity reflection amplitudes
    hyperqnd reflection-sweep  reflection coefficient versus probe detuning

Every option can also come from a ``--config`` file of ``key = value`` lines
(``#`` starts a comment); command-line flags win over the file. Rates and
frequencies are in units of 2*pi*GHz.

Exit codes: 0 success, 2 configuration error, 3 numeric domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .cavity import (
    CavityParams,
    fidelity_closed_form_P,
    fidelity_closed_form_S,
    reflection_coefficient,
    reflection_pair,
)
from .errors import DomainError
from .protocols.ecp import ecp_success_probability
from .protocols.epp import EppEnsemble, epp_iterate
from .protocols.sampling import sample_ecp, sample_epp

OUTPUT_DIR_ENV = "HYPERQND_OUTPUT_DIR"


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


# ---- value parsers -----------------------------------------------------------

def _float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"not a finite number: {text!r}")
    return v


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"not an integer: {text!r}") from None


def _grid(text: str) -> list[float]:
    """Comma list ``a,b,c`` or inclusive range ``start:stop:step``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (_float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"empty or invalid range {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 12) for k in range(count)]
    values = [_float(p) for p in text.split(",") if p.strip()]
    if not values:
        raise ConfigError("grid must not be empty")
    return values


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ConfigError(f"expected one of {', '.join(options)}, got {text!r}")
        return text
    return parse


@dataclass(frozen=True)
class Option:
    parse: Callable[[str], Any]
    default: Any
    help: str


COMMON = {
    "out": Option(str, None, "output file (default: stdout); relative paths go under $" + OUTPUT_DIR_ENV),
    "format": Option(_choice("csv", "json"), "csv", "csv or json"),
    "seed": Option(_int, None, "random seed, required when shots > 0"),
    "shots": Option(_int, 0, "Monte Carlo shots; 0 = exact enumeration only"),
}

CAVITY = {
    "g": Option(_grid, [1.0], "NV-cavity coupling strength(s)"),
    "gamma": Option(_float, 0.015, "NV decay rate"),
    "eta": Option(_float, 10.0, "cavity field decay rate"),
    "kappa": Option(_grid, [1.0], "side-leakage rate(s)"),
    "detuning": Option(_float, 0.0, "probe detuning from the (common) cavity/NV frequency"),
}

COMMANDS: dict[str, dict[str, Option]] = {
    "epp": {
        "f1": Option(_float, 0.8, "initial polarization fidelity"),
        "f2": Option(_float, None, "initial spatial fidelity (default: f1)"),
        "f_grid": Option(_grid, None, "grid of F1 = F2 values; overrides f1/f2"),
        "n": Option(_int, 5, "largest number of rounds"),
    },
    "ecp": {
        "two_alpha_sq": Option(_grid, _grid("0.05:1.0:0.05"), "grid of 2|alpha|^2 values (alpha = gamma)"),
        "n": Option(_int, 5, "largest number of rounds"),
    },
    "qnd-fidelity": dict(CAVITY),
    "reflection-sweep": {
        **{k: v for k, v in CAVITY.items() if k != "detuning"},
        "g": Option(_float, 1.0, "NV-cavity coupling strength"),
        "kappa": Option(_float, 1.0, "side-leakage rate"),
        "detuning_min": Option(_float, -20.0, "first probe detuning"),
        "detuning_max": Option(_float, 20.0, "last probe detuning"),
        "points": Option(_int, 401, "number of detuning points"),
    },
}

COLUMNS = {
    "epp": ["n", "F1", "F2", "F_prime", "cumulative_yield"],
    "ecp": ["two_alpha_sq", "n", "p_n", "P_cumulative"],
    "qnd-fidelity": ["g", "kappa", "eta", "gamma", "abs_r0", "abs_r", "F_P", "F_S"],
    "reflection-sweep": ["omega_detuning", "re_r", "im_r", "abs_r"],
}
MC_COLUMNS = ["mc_estimate", "mc_stderr"]


@dataclass
class RunConfig:
    command: str
    params: dict[str, Any] = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"

    def __getitem__(self, key: str) -> Any:
        return self.params[key]


# ---- config assembly ---------------------------------------------------------

def _normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    raw: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        raw[_normalize_key(key)] = value.strip()
    return raw


def build_config(command: str, file_values: dict[str, str], flag_values: dict[str, str]) -> RunConfig:
    options = {**COMMON, **COMMANDS[command]}
    merged: dict[str, Any] = {k: opt.default for k, opt in options.items()}
    for source in (file_values, flag_values):
        for key, text in source.items():
            if key not in options:
                raise ConfigError(f"unknown key {key!r} for command {command!r}")
            merged[key] = options[key].parse(text)
    validate(command, merged)
    out, fmt = merged.pop("out"), merged.pop("format")
    return RunConfig(command, merged, out, fmt)


def _unit(name: str, v: float):
    if not 0.0 <= v <= 1.0:
        raise ConfigError(f"{name} must lie in [0, 1], got {v!r}")


def validate(command: str, p: dict[str, Any]):
    if p["shots"] < 0:
        raise ConfigError("shots must be nonnegative")
    if p["shots"] > 0 and p["seed"] is None:
        raise ConfigError("a seed is required when shots > 0")
    if command in ("epp", "ecp") and p["n"] < 0:
        raise ConfigError("n must be nonnegative")
    if command == "epp":
        _unit("f1", p["f1"])
        if p["f2"] is not None:
            _unit("f2", p["f2"])
        for f in p["f_grid"] or []:
            _unit("f_grid entry", f)
    elif command == "ecp":
        for x in p["two_alpha_sq"]:
            if not 0.0 < x < 2.0:
                raise ConfigError(f"two_alpha_sq entries must lie in (0, 2), got {x!r}")
    else:
        for key in ("gamma", "eta"):
            if p[key] < 0:
                raise ConfigError(f"{key} must be nonnegative")
        for key in ("g", "kappa"):
            values = p[key] if isinstance(p[key], list) else [p[key]]
            if any(v < 0 for v in values):
                raise ConfigError(f"{key} must be nonnegative")
        if command == "reflection-sweep":
            if p["points"] < 1:
                raise ConfigError("points must be at least 1")
            if p["detuning_max"] < p["detuning_min"]:
                raise ConfigError("detuning_max must not be below detuning_min")


# ---- runners -----------------------------------------------------------------

def run_epp(cfg: RunConfig) -> list[dict[str, Any]]:
    if cfg["f_grid"]:
        starts = [(f, f) for f in cfg["f_grid"]]
    else:
        f1 = cfg["f1"]
        starts = [(f1, f1 if cfg["f2"] is None else cfg["f2"])]
    rows = []
    for f1, f2 in starts:
        for step in epp_iterate(f1, f2, cfg["n"]):
            row = {"n": step.n, "F1": f1, "F2": f2, "F_prime": step.fidelity,
                   "cumulative_yield": step.cumulative_yield}
            if cfg["shots"] > 0:
                st = sample_epp(EppEnsemble.bit_flip(f1, f2), step.n, cfg["shots"], cfg["seed"])
                row.update(mc_estimate=st.rate, mc_stderr=st.stderr)
            rows.append(row)
    return rows


def run_ecp(cfg: RunConfig) -> list[dict[str, Any]]:
    rows = []
    for x in cfg["two_alpha_sq"]:
        alpha = math.sqrt(x / 2)
        res = ecp_success_probability(alpha, alpha, cfg["n"])
        cum = 0.0
        for k, p in enumerate(res.per_round, 1):
            cum += p
            row = {"two_alpha_sq": x, "n": k, "p_n": p, "P_cumulative": cum}
            if cfg["shots"] > 0:
                st = sample_ecp(alpha, alpha, k, cfg["shots"], cfg["seed"])
                row.update(mc_estimate=st.rate, mc_stderr=st.stderr)
            rows.append(row)
    return rows


def run_qnd_fidelity(cfg: RunConfig) -> list[dict[str, Any]]:
    rows = []
    for g in cfg["g"]:
        for kappa in cfg["kappa"]:
            params = CavityParams(g=g, gamma=cfg["gamma"], eta=cfg["eta"], kappa=kappa)
            rp = reflection_pair(params, cfg["detuning"])
            a0, a = abs(rp.r0), abs(rp.r)
            rows.append({"g": g, "kappa": kappa, "eta": cfg["eta"], "gamma": cfg["gamma"],
                         "abs_r0": a0, "abs_r": a,
                         "F_P": fidelity_closed_form_P(a0, a),
                         "F_S": fidelity_closed_form_S(a0, a)})
    return rows


def run_reflection_sweep(cfg: RunConfig) -> list[dict[str, Any]]:
    params = CavityParams(g=cfg["g"], gamma=cfg["gamma"], eta=cfg["eta"], kappa=cfg["kappa"])
    lo, hi, n = cfg["detuning_min"], cfg["detuning_max"], cfg["points"]
    rows = []
    for k in range(n):
        d = lo if n == 1 else lo + (hi - lo) * k / (n - 1)
        r = reflection_coefficient(params, d)
        rows.append({"omega_detuning": d, "re_r": r.real, "im_r": r.imag, "abs_r": abs(r)})
    return rows


RUNNERS = {
    "epp": run_epp,
    "ecp": run_ecp,
    "qnd-fidelity": run_qnd_fidelity,
    "reflection-sweep": run_reflection_sweep,
}


# ---- output ------------------------------------------------------------------

def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return format(v, ".15g")
    return str(v)


def render(rows: list[dict[str, Any]], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{c: r[c] for c in columns} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def output_path(out: str | None) -> Path | None:
    if out is None or out == "-":
        return None
    path = Path(out)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def execute(cfg: RunConfig) -> str:
    rows = RUNNERS[cfg.command](cfg)
    columns = COLUMNS[cfg.command] + (MC_COLUMNS if cfg.params.get("shots", 0) > 0 else [])
    return render(rows, columns, cfg.format)


# ---- entry point -------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperqnd",
        description="Hyperentanglement purification/concentration tables. "
                    "All rates are in units of 2*pi*GHz.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, options in COMMANDS.items():
        p = sub.add_parser(name, help=f"{name} table")
        p.add_argument("--config", help="key = value config file; flags override it")
        for key, opt in {**COMMON, **options}.items():
            shown = "" if opt.default is None else f" (default: {_describe(opt.default)})"
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None,
                           metavar="VALUE", help=opt.help + shown)
    return parser


def _describe(v: Any) -> str:
    if isinstance(v, list):
        return ",".join(_fmt(x) for x in v) if len(v) <= 4 else f"{_fmt(v[0])}..{_fmt(v[-1])}"
    return _fmt(v)


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config") and v is not None}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = build_config(args.command, file_values, flags)
        text = execute(cfg)
    except ConfigError as e:
        print(f"hyperqnd: configuration error: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        print(f"hyperqnd: domain error: {e}", file=sys.stderr)
        return 3
    path = output_path(cfg.out)
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
