"""Command-line interface.

Every subcommand writes a table as CSV (default) or JSON to stdout or
``--out``. CSV files start with ``# kitaev-mpe v<version>``, followed by
``#``-prefixed provenance lines, a header row and one line per record.
Exit codes: 0 success, 1 input error, 2 numerical-failure flags present.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from kitaev_mpe import __version__
from kitaev_mpe.analysis import (
    DEFAULT_SIZES, collapse_deviation, fisher_density_scaling, susceptibility,
)
from kitaev_mpe.correlators import (
    ALL_KINDS, OperatorKind, best_operator, correlation_profile, fisher_densities, kernel_for,
)
from kitaev_mpe.errors import KitaevError, NumericalError, ParameterError
from kitaev_mpe.model import ModelParams, parse_alpha, solve, winding
from kitaev_mpe.oracle import MAX_QFI_L, oracle_check
from kitaev_mpe.sweep import OBSERVABLES, STATUS_OK, Axis, SweepSpec, default_workers, run_sweep

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2
ORACLE_TOLERANCES = {
    "energy_error": 1e-10,
    "energy_variance": 1e-10,
    "norm_error": 1e-10,
    "parity_error": 1e-10,
    "correlation_error": 1e-9,
    "fisher_density_error": 1e-9,
    "mean_error": 1e-12,
}
_NOT_ECHOED = {"command", "config", "out", "format", "workers"}


class InputError(Exception):
    """Bad command line, configuration file or output path."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


@dataclass
class Table:
    columns: list
    rows: list
    comments: list = field(default_factory=list)
    failed: bool = False


def _sizes(text) -> tuple:
    try:
        sizes = tuple(int(s) for s in str(text).replace(" ", "").split(",") if s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers: {text!r}") from exc
    if not sizes:
        raise argparse.ArgumentTypeError("empty size list")
    return sizes


def _alpha(text) -> float:
    try:
        return parse_alpha(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _axis(text) -> Axis:
    try:
        return Axis.parse(text)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _operator(text) -> str:
    key = text.strip().lower()
    if key in ("best", "all"):
        return key
    try:
        return OperatorKind.parse(key).name
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int(text) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


# dest -> (type, default); defaults apply after flags and the config file
OPTIONS = {
    "J": (float, 1.0),
    "mu": (float, 0.0),
    "delta": (float, 1.0),
    "alpha": (_alpha, 1000.0),
    "L": (int, 100),
    "format": (str, "csv"),
    "out": (str, None),
    "operator": (_operator, "best"),
    "sizes": (_sizes, None),
    "b": (float, None),
    "resolution": (_positive_int, 4096),
    "axis1": (_axis, None),
    "axis2": (_axis, None),
    "observable": (str, "fisher_density_best"),
    "workers": (_positive_int, None),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--J", type=float, help="hopping amplitude (> 0)")
    g.add_argument("--mu", type=float, help="chemical potential")
    g.add_argument("--delta", type=float, help="pairing amplitude")
    g.add_argument("--alpha", type=_alpha, help="pairing decay exponent; 'inf' for nearest neighbour")
    g.add_argument("--L", type=int, help="chain length (even, >= 4)")
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=("csv", "json"))
    o.add_argument("--out", help="output path (default stdout)")
    o.add_argument("--config", help="file of 'key = value' lines; flags take precedence")

    parser = _Parser(prog="kitaev-mpe", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"kitaev-mpe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("spectrum", parents=[common], help="mode energies and Bogoliubov angles")
    p = sub.add_parser("winding", parents=[common], help="winding number of the Bloch vector")
    p.add_argument("--resolution", type=_positive_int, help="number of k points (default 4096)")
    p = sub.add_parser("qfi", parents=[common], help="Fisher density and entanglement depth")
    p.add_argument("--operator", type=_operator, help="x, y, x_st, y_st, best or all")
    p = sub.add_parser("fit", parents=[common], help="fit f_Q = 1 + c L^b across sizes")
    p.add_argument("--operator", type=_operator, help="x, y, x_st, y_st or best")
    p.add_argument("--sizes", type=_sizes, help="comma-separated chain lengths")
    p = sub.add_parser("sweep", parents=[common], help="two-parameter sweep of one observable")
    p.add_argument("--axis1", type=_axis, help="outer axis name:start:stop:steps")
    p.add_argument("--axis2", type=_axis, help="inner axis name:start:stop:steps")
    p.add_argument("--observable", choices=OBSERVABLES)
    p.add_argument("--sizes", type=_sizes, help="sizes for b_exponent / c_prefactor")
    p.add_argument("--workers", type=_positive_int,
                   help="worker processes (default: $KITAEV_MPE_WORKERS or available CPUs)")
    sub.add_parser("susceptibility", parents=[common], help="fidelity susceptibilities")
    p = sub.add_parser("collapse", parents=[common], help="collapse of rescaled correlations")
    p.add_argument("--operator", type=_operator, help="x, y, x_st, y_st or best")
    p.add_argument("--sizes", type=_sizes, help="chain lengths (default 100,200,400)")
    p.add_argument("--b", type=float, help="exponent (default: fitted over the default size ladder)")
    sub.add_parser("oracle-check", parents=[common], help=f"Fock-space cross-check (L <= {MAX_QFI_L})")
    return parser


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path!r}: {exc}") from exc
    out = {}
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"{path}:{num}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def resolve_options(ns: argparse.Namespace) -> dict:
    """Merge flags > config file > environment (workers) > defaults."""
    opts = {k: v for k, v in vars(ns).items() if k != "config"}
    config = read_config(ns.config) if getattr(ns, "config", None) else {}
    for key, raw in config.items():
        if key not in OPTIONS or key not in opts:
            raise InputError(f"config key {key!r} is not an option of '{ns.command}'")
        if opts[key] is None:
            conv = OPTIONS[key][0]
            try:
                opts[key] = conv(raw)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise InputError(f"config key {key!r}: {exc}") from exc
    if "workers" in opts and opts["workers"] is None:
        env = os.environ.get("KITAEV_MPE_WORKERS")
        if env:
            try:
                opts["workers"] = _positive_int(env)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise InputError(f"KITAEV_MPE_WORKERS: {exc}") from exc
        else:
            opts["workers"] = default_workers()
    for key, value in list(opts.items()):
        if value is None and key in OPTIONS:
            opts[key] = OPTIONS[key][1]
    if opts["format"] not in ("csv", "json"):
        raise InputError(f"format must be csv or json, got {opts['format']!r}")
    if opts.get("observable") not in (None, *OBSERVABLES):
        raise InputError(f"unknown observable {opts['observable']!r}")
    return opts


def _params(opts) -> ModelParams:
    return ModelParams(J=opts["J"], mu=opts["mu"], delta=opts["delta"], alpha=opts["alpha"], L=opts["L"])


def _fit_kind(opts):
    name = opts["operator"]
    if name == "all":
        raise ParameterError("--operator all is only valid for qfi")
    return None if name == "best" else OperatorKind.parse(name)


def cmd_spectrum(opts) -> Table:
    sol = solve(_params(opts))
    rows = [[n, float(k), float(f), float(e), float(t)]
            for n, (k, f, e, t) in enumerate(zip(sol.modes, sol.f, sol.epsilon, sol.theta))]
    return Table(["n", "k", "f_alpha", "epsilon", "theta"], rows,
                 comments=[f"ground_energy = {sol.ground_energy!r}", f"gap = {sol.gap!r}"])


def cmd_winding(opts) -> Table:
    res = winding(_params(opts), resolution=opts["resolution"])
    return Table(["winding", "winding_fraction", "raw", "snap_error"],
                 [[float(res.snapped), str(res.snapped), res.raw, res.snap_error]])


def cmd_qfi(opts) -> Table:
    params = _params(opts)
    name = opts["operator"]
    results = fisher_densities(params)
    if name == "all":
        chosen = list(ALL_KINDS)
    elif name == "best":
        chosen = [best_operator(params)[0]]
    else:
        chosen = [OperatorKind.parse(name)]
    rows = [[k.name, results[k].fisher_density, results[k].fisher, results[k].witnessed_depth,
             results[k].genuine_l_partite] for k in chosen]
    return Table(["operator", "fisher_density", "fisher", "depth", "genuine_l_partite"], rows)


def cmd_fit(opts) -> Table:
    sizes = opts["sizes"] or DEFAULT_SIZES
    fit = fisher_density_scaling(_params(opts), sizes, _fit_kind(opts))
    comments = [f"sample L={L} f_Q={v!r}" for L, v in zip(fit.sizes, fit.values)]
    return Table(["operator", "b", "c", "r_squared", "residual_rms", "flat", "n_sizes"],
                 [[opts["operator"], fit.b, fit.c, fit.r_squared, fit.residual_rms, fit.flat, len(fit.sizes)]],
                 comments=comments)


def cmd_sweep(opts) -> Table:
    if opts["axis1"] is None or opts["axis2"] is None:
        raise InputError("sweep needs --axis1 and --axis2")
    spec = SweepSpec(axis1=opts["axis1"], axis2=opts["axis2"], fixed=_params(opts),
                     observable=opts["observable"], sizes=tuple(opts["sizes"] or ()))
    result = run_sweep(spec, workers=opts["workers"])
    rows = [[r.value1, r.value2, r.value, r.status, r.message] for r in result.rows]
    return Table([spec.axis1.name, spec.axis2.name, spec.observable, "status", "message"], rows,
                 failed=result.failures > 0)


def cmd_susceptibility(opts) -> Table:
    res = susceptibility(_params(opts))
    return Table(["chi_mu", "chi_delta", "chi_alpha"], [[res.chi_mu, res.chi_delta, res.chi_alpha]])


def cmd_collapse(opts) -> Table:
    sizes = opts["sizes"] or (100, 200, 400)
    params = _params(opts)
    kind = _fit_kind(opts)
    if kind is None:
        kind = best_operator(params.replace(L=max(sizes)))[0]
    b = opts["b"]
    if b is None:
        b = fisher_density_scaling(params, DEFAULT_SIZES, kind).b
    profiles = [correlation_profile(kernel_for(params.replace(L=L)), kind) for L in sizes]
    return Table(["operator", "b", "deviation"], [[kind.name, b, collapse_deviation(profiles, b)]])


def cmd_oracle_check(opts) -> Table:
    params = _params(opts)
    if params.L > MAX_QFI_L:
        raise ParameterError(f"oracle-check supports L <= {MAX_QFI_L}, got {params.L}")
    report = oracle_check(params)
    rows = [[key, value, ORACLE_TOLERANCES[key], "ok" if value <= ORACLE_TOLERANCES[key] else "mismatch"]
            for key, value in report.items()]
    return Table(["check", "value", "tolerance", "status"], rows,
                 failed=any(r[3] != "ok" for r in rows))


COMMANDS = {
    "spectrum": cmd_spectrum,
    "winding": cmd_winding,
    "qfi": cmd_qfi,
    "fit": cmd_fit,
    "sweep": cmd_sweep,
    "susceptibility": cmd_susceptibility,
    "collapse": cmd_collapse,
    "oracle-check": cmd_oracle_check,
}


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, Fraction):
        return str(value)
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def timestamp() -> str:
    """UTC time, or ``SOURCE_DATE_EPOCH`` when set for reproducible output."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        moment = _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
    else:
        moment = _dt.datetime.now(tz=_dt.timezone.utc)
    return moment.replace(microsecond=0).isoformat()


def provenance(opts) -> dict:
    echo = {k: v for k, v in opts.items() if k not in _NOT_ECHOED}
    return {
        "version": __version__,
        "command": opts["command"],
        "timestamp": timestamp(),
        "parameters": {k: (str(v) if isinstance(v, Axis) else list(v) if isinstance(v, tuple) else v)
                       for k, v in sorted(echo.items())},
    }


def render_csv(table: Table, prov: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# kitaev-mpe v{prov['version']}\n")
    buf.write(f"# command: {prov['command']}\n")
    buf.write(f"# timestamp: {prov['timestamp']}\n")
    for key, value in prov["parameters"].items():
        buf.write(f"# {key} = {format_value(value) if not isinstance(value, list) else ','.join(map(str, value))}\n")
    for line in table.comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def render_json(table: Table, prov: dict) -> str:
    doc = dict(prov)
    doc["parameters"] = {k: _json_value(v) for k, v in prov["parameters"].items()}
    doc["comments"] = table.comments
    doc["columns"] = table.columns
    doc["rows"] = [{c: _json_value(v) for c, v in zip(table.columns, row)} for row in table.rows]
    return json.dumps(doc, indent=2) + "\n"


def read_csv(text: str):
    """Parse CSV output back into ``(columns, rows)``; comment lines are skipped."""
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    reader = csv.reader(lines)
    columns = next(reader)
    return columns, [row for row in reader]


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        ns = build_parser().parse_args(argv)
        opts = resolve_options(ns)
        table = COMMANDS[opts["command"]](opts)
        prov = provenance(opts)
        text = render_json(table, prov) if opts["format"] == "json" else render_csv(table, prov)
        if opts["out"]:
            try:
                with open(opts["out"], "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            except OSError as exc:
                raise InputError(f"cannot write {opts['out']!r}: {exc}") from exc
        else:
            stdout.write(text)
    except (InputError, ParameterError) as exc:
        stderr.write(f"kitaev-mpe: error: {exc}\n")
        return EXIT_INPUT
    except (NumericalError, KitaevError, ArithmeticError) as exc:
        stderr.write(f"kitaev-mpe: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    if table.failed:
        stderr.write("kitaev-mpe: some records carry numerical-failure flags\n")
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


__all__ = ["run", "main", "build_parser", "read_csv", "Table", "STATUS_OK"]
