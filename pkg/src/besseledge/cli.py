"""Command-line front end.

Each subcommand builds a :class:`Table` and writes it as CSV or JSON. A
table carries the quantity it reports and the exact parameters used, so
output files are self-describing. Parameters come from an optional flat
``key=value`` config file, overridden by command-line flags.

Exit codes: 0 success, 2 invalid configuration, 3 numerical
non-convergence, 4 precondition or regime violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

from . import asympt, dppsim, fredholm
from .errors import ConvergenceError, DomainError, RegimeError, SpectrumError, ValidityError
from .kernels import KernelSpec, kernel_matrix

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_REGIME = 4

SUBCOMMANDS = ("moments", "gap", "counting", "clt", "rigidity", "kernel")

DEFAULTS = {
    "r": [100.0, 400.0, 1600.0],
    "a": 1.0,
    "x": [2.0, 4.0],
    "u": [0.5, -0.3],
    "y": [-1.0, 0.0, 1.0],
    "alpha": None,
    "order": fredholm.DEFAULT_ORDER,
    "seed": 42,
    "trials": 2000,
    "eps": 0.5,
    "delta": 0.2,
    "kmax": 4.0,
    "regime": "1",
    "workers": 1,
    "tol": None,
}

# key -> (parser, is_list)
_FLOAT = float
_KEYS = {
    "r": (_FLOAT, True),
    "a": (_FLOAT, False),
    "x": (_FLOAT, True),
    "u": (_FLOAT, True),
    "y": (_FLOAT, True),
    "alpha": (_FLOAT, False),
    "order": (int, False),
    "seed": (int, False),
    "trials": (int, False),
    "eps": (_FLOAT, False),
    "delta": (_FLOAT, False),
    "kmax": (_FLOAT, False),
    "regime": (str, False),
    "workers": (int, False),
    "tol": (_FLOAT, False),
    "format": (str, False),
    "out": (str, False),
}


class ConfigError(ValueError):
    """Raised for malformed or inconsistent run configurations."""


@dataclass
class RunConfig:
    subcommand: str
    params: dict
    output: str | None = None
    fmt: str = "csv"


@dataclass
class Table:
    quantity: str
    meta: dict
    columns: list
    rows: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def _convert(key, text):
    if key not in _KEYS:
        raise ConfigError(f"unknown parameter {key!r}")
    conv, is_list = _KEYS[key]
    try:
        if is_list:
            items = [s.strip() for s in str(text).split(",") if s.strip()]
            if not items:
                raise ConfigError(f"{key} needs at least one value")
            return [conv(s) for s in items]
        return conv(str(text).strip())
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc


def read_config_file(path):
    """Parse a flat ``key=value`` file; blank lines and ``#`` comments are skipped."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lower().replace("-", "_").replace("k_max", "kmax")] = value
    return out


def build_parser():
    parser = argparse.ArgumentParser(prog="besseledge", description="Large-order Bessel process statistics.")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    for key in ("r", "a", "x", "u", "y", "alpha", "order", "seed", "trials", "eps", "delta", "kmax", "workers", "tol"):
        parser.add_argument(f"--{key}", default=None)
    parser.add_argument("--regime", default=None, choices=[m.value for m in asympt.Regime])
    parser.add_argument("--format", default=None, choices=["csv", "json"])
    parser.add_argument("--out", default=None)
    parser.add_argument("--config", default=None)
    return parser


def make_config(argv):
    """Turn argv into a validated :class:`RunConfig`."""
    ns = build_parser().parse_args(argv)
    raw = read_config_file(ns.config) if ns.config else {}
    for key in _KEYS:
        value = getattr(ns, key, None)
        if value is not None:
            raw[key] = value
    params = dict(DEFAULTS)
    fmt, out = "csv", None
    for key, text in raw.items():
        value = _convert(key, text)
        if key == "format":
            fmt = value
        elif key == "out":
            out = value
        else:
            params[key] = value
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    cfg = RunConfig(ns.subcommand, params, out, fmt)
    validate(cfg)
    return cfg


def _increasing(vals):
    return all(b > a for a, b in zip(vals, vals[1:]))


def validate(cfg):
    p = cfg.params
    sub = cfg.subcommand
    try:
        asympt.Regime.parse(p["regime"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if p["order"] < 8:
        raise ConfigError("order must be at least 8")
    if any(not r > 0 for r in p["r"]):
        raise ConfigError("r must be positive")
    if not p["a"] >= 0:
        raise ConfigError("a must be non-negative")
    if p["alpha"] is not None and not p["alpha"] > -1:
        raise ConfigError("alpha must exceed -1")
    if sub in ("moments", "counting", "clt"):
        if not _increasing(p["x"]) or p["x"][0] <= 0:
            raise ConfigError("x must be positive and strictly increasing")
    if sub == "moments" and len(p["u"]) != len(p["x"]):
        raise ConfigError("x and u must have the same length")
    if sub in ("clt", "rigidity"):
        if p["trials"] < 1:
            raise ConfigError("trials must be positive")
        if len(p["r"]) != 1:
            raise ConfigError(f"{sub} takes a single r")
    if sub == "rigidity" and not (p["delta"] > 0 and p["kmax"] > p["delta"] and p["eps"] > 0):
        raise ConfigError("rigidity needs 0 < delta < kmax and eps > 0")
    if any(not math.isfinite(v) for key in ("x", "y", "u") for v in p[key]):
        raise ConfigError("x, y and u must be finite")
    if p["workers"] < 1:
        raise ConfigError("workers must be positive")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _meta(cfg, keys):
    return {k: cfg.params[k] for k in keys}


def cmd_moments(cfg):
    p = cfg.params
    regime = asympt.Regime.parse(p["regime"])
    if regime is asympt.Regime.AIRY:
        raise RegimeError("moments compares Bessel quantities; use regime 1, 2, 3 or bounded")
    table = Table(
        "log E_alpha(r x, u) [exponential moment of the counting function]",
        _meta(cfg, ("r", "a", "x", "u", "order", "regime", "tol")),
        ["r", "numeric", "asympt", "diff", "error_tag"],
    )
    for r in p["r"]:
        q = fredholm.ExpMomentQuery(r, p["a"], tuple(p["x"]), tuple(p["u"]))
        num = fredholm.log_exp_moment(q, p["order"], p["tol"])
        if regime is asympt.Regime.BOUNDED_ALPHA:
            pred = asympt.log_exp_moment_bounded_alpha(q)
        else:
            pred = asympt.log_exp_moment_asympt(q, regime)
        table.rows.append([r, num, pred.value, num - pred.value, pred.error_scale])
    return table


def cmd_gap(cfg):
    p = cfg.params
    alpha = p["alpha"] if p["alpha"] is not None else 100.0
    if not alpha > 0:
        raise ConfigError("gap needs alpha > 0")
    table = Table(
        "gap probabilities: Bessel on [0, alpha^2 + 2^(2/3) alpha^(4/3) y] vs Airy on [-y, inf)",
        {"alpha": alpha, "y": p["y"], "order": p["order"], "tol": p["tol"]},
        ["y", "s", "bessel", "airy", "diff"],
    )
    for y in p["y"]:
        s = fredholm.soft_edge_point(alpha, y)
        if not s > 0:
            raise RegimeError(f"y={y} maps to a non-positive Bessel interval")
        b = fredholm.gap_probability(alpha, s, p["order"], p["tol"])
        a = fredholm.airy_gap_probability(y, tol=p["tol"])
        table.rows.append([y, s, b, a, b - a])
    return table


def cmd_counting(cfg):
    p = cfg.params
    table = Table(
        "counting statistics of N(r x): numeric vs mu_alpha, sigma_alpha^2 + (1 + gamma_E)/(2 pi^2), Sigma_a",
        _meta(cfg, ("r", "a", "x", "order", "tol")) | {"gamma_euler": asympt.EULER_GAMMA},
        ["r", "statistic", "x1", "x2", "numeric", "asympt", "diff"],
    )
    a = p["a"]
    xs = p["x"]
    for r in p["r"]:
        ep = asympt.EdgeParams(r, a)
        alpha = ep.alpha
        for x in xs:
            if x <= a * a:
                raise RegimeError(f"x={x} must exceed a^2={a * a}")
        for x in xs:
            num = fredholm.counting_mean(alpha, r * x, p["order"], p["tol"])
            pred = asympt.mu_alpha(ep, x)
            table.rows.append([r, "mean", x, x, num, pred, num - pred])
        for x in xs:
            num = fredholm.counting_var(alpha, r * x, p["order"], p["tol"])
            pred = asympt.sigma2_alpha(ep, x) + asympt.VARIANCE_CONSTANT
            table.rows.append([r, "variance", x, x, num, pred, num - pred])
        for j in range(len(xs)):
            for k in range(j + 1, len(xs)):
                num = fredholm.counting_cov(alpha, r * xs[j], r * xs[k], p["order"], p["tol"])
                pred = asympt.cov_sigma_a(a, xs[j], xs[k])
                table.rows.append([r, "covariance", xs[j], xs[k], num, pred, num - pred])
    return table


def cmd_clt(cfg):
    p = cfg.params
    ep = asympt.EdgeParams(p["r"][0], p["a"])
    common = dict(order=p["order"], workers=p["workers"])
    reports = {
        "counts": dppsim.clt_experiment(ep, p["x"], p["trials"], p["seed"], **common),
        "classical_location": dppsim.classical_location_experiment(ep, p["x"], p["trials"], p["seed"], **common),
    }
    table = Table(
        "Kolmogorov-Smirnov distance of normalised fluctuations to N(0,1)",
        _meta(cfg, ("r", "a", "x", "trials", "seed", "order")),
        ["statistic", "j", "x", "ks", "critical", "pass", "n_discarded"],
    )
    for name, rep in reports.items():
        for j, x in enumerate(p["x"]):
            table.rows.append([name, j + 1, x, rep.ks[j], rep.critical, rep.ks[j] < rep.critical, rep.n_discarded])
        table.meta[f"correlation_{name}"] = rep.correlation.tolist()
    return table


def cmd_rigidity(cfg):
    p = cfg.params
    ep = asympt.EdgeParams(p["r"][0], p["a"])
    rep = dppsim.rigidity_experiment(
        ep, p["delta"], p["kmax"], p["eps"], p["trials"], p["seed"], order=p["order"], workers=p["workers"]
    )
    d = rep.to_dict()
    cols = list(d)
    return Table(
        "rigidity: max_k |mu_alpha(xi_k) - k| / log k against sqrt(1 + eps)/pi",
        _meta(cfg, ("r", "a", "delta", "kmax", "eps", "trials", "seed", "order")),
        cols,
        [[d[c] for c in cols]],
    )


def cmd_kernel(cfg):
    p = cfg.params
    regime = asympt.Regime.parse(p["regime"])
    if regime is asympt.Regime.AIRY:
        spec = KernelSpec.airy()
        pts = p["x"]
        meta = {"family": "airy", "points": pts}
    else:
        alpha = p["alpha"] if p["alpha"] is not None else p["a"] * math.sqrt(p["r"][0])
        spec = KernelSpec.bessel(alpha)
        pts = p["x"]
        meta = {"family": "bessel", "alpha": alpha, "points": pts}
    k = kernel_matrix(spec, pts)
    table = Table("kernel values K(x, y)", meta, ["x", "y", "kernel"])
    for i, xi in enumerate(pts):
        for j, yj in enumerate(pts):
            table.rows.append([xi, yj, float(k[i, j])])
    return table


COMMANDS = {
    "moments": cmd_moments,
    "gap": cmd_gap,
    "counting": cmd_counting,
    "clt": cmd_clt,
    "rigidity": cmd_rigidity,
    "kernel": cmd_kernel,
}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def fmt_number(v):
    """17 significant digits, enough to round-trip a double."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:#.17g}"
    if isinstance(v, (list, tuple)):
        return ";".join(fmt_number(e) for e in v)
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        return float(fmt_number(v)) if math.isfinite(v) else fmt_number(v)
    if isinstance(v, (list, tuple)):
        return [_json_value(e) for e in v]
    if isinstance(v, dict):
        return {k: _json_value(e) for k, e in v.items()}
    return v


def render(table, fmt):
    if fmt == "json":
        obj = {
            "meta": {"quantity": table.quantity, "parameters": _json_value(table.meta), "columns": table.columns},
            "rows": [dict(zip(table.columns, _json_value(row))) for row in table.rows],
        }
        return json.dumps(obj, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# quantity: {table.quantity}\n")
    buf.write("# parameters: " + " ".join(f"{k}={fmt_number(v)}" for k, v in table.meta.items()) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([fmt_number(v) for v in row])
    return buf.getvalue()


def run(cfg):
    """Execute a validated configuration and return ``(exit_code, text)``."""
    try:
        table = COMMANDS[cfg.subcommand](cfg)
    except ConfigError as exc:
        return EXIT_CONFIG, f"invalid configuration: {exc}"
    except (ConvergenceError, SpectrumError) as exc:
        return EXIT_CONVERGENCE, f"numerical non-convergence: {exc}"
    except (RegimeError, ValidityError, DomainError) as exc:
        return EXIT_REGIME, f"precondition violated: {exc}"
    return EXIT_OK, render(table, cfg.fmt)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = make_config(argv)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:
        # argparse reports its own errors; map them onto the config exit code
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    code, text = run(cfg)
    if code != EXIT_OK:
        print(text, file=sys.stderr)
        return code
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
