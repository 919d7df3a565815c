"""Command-line entry point: ``spectrum``, ``evolve`` and ``verify``.

Settings resolve as command-line flags > JSON config file > defaults,
where the defaults are the reference parameters (omega = 5, gamma = 1, j = 5).
Every output file starts with ``#`` lines holding the resolved config.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .core import SystemParams
from .dynamics import sample_trajectory
from .errors import TrimmerError
from .ptcheck import phase_diagram_row
from .state import Method, Site
from .verify import run_suite

log = logging.getLogger("pttrimmer")

FLOAT_FORMAT = "{:.16e}"  # 17 significant digits


class ConfigError(TrimmerError, ValueError):
    """Invalid run configuration."""


@dataclass(frozen=True)
class RunConfig:
    omega: float = 5.0
    gamma: float = 1.0
    j: float = 5.0
    j_min: float = 0.05
    j_max: float = 2.0
    n_steps: int = 200
    t_max: float = 10.0
    n_points: int = 2001
    initial_site: str = "passive"
    method: str = "closed_form"
    out: str | None = None
    output_format: str = "csv"
    tolerance_scale: float = 1.0

    @property
    def params(self) -> SystemParams:
        return SystemParams(self.omega, self.gamma, self.j)

    def validate(self, command: str) -> "RunConfig":
        config = _coerce(self)
        try:
            config.params
            site = Site.parse(config.initial_site)
            method = Method.parse(config.method)
        except TrimmerError as exc:
            raise ConfigError(str(exc)) from exc
        if config.output_format not in ("csv", "json"):
            raise ConfigError(f"output_format must be csv or json, got {config.output_format!r}")
        if command == "spectrum":
            if not (0 < config.j_min <= config.j_max) or not math.isfinite(config.j_max):
                raise ConfigError(f"need 0 < j_min <= j_max, got [{config.j_min}, {config.j_max}]")
            if config.j_min < config.j_max and config.n_steps < 2:
                raise ConfigError(f"a sweep needs n_steps >= 2, got {config.n_steps}")
        if command == "evolve":
            if not config.t_max > 0:
                raise ConfigError(f"t_max must be positive, got {config.t_max}")
            if config.n_points < 2:
                raise ConfigError(f"n_points must be >= 2, got {config.n_points}")
        return replace(config, initial_site=site.value, method=method.value)


_FLOAT_FIELDS = ("omega", "gamma", "j", "j_min", "j_max", "t_max", "tolerance_scale")
_INT_FIELDS = ("n_steps", "n_points")


def _coerce(config: RunConfig) -> RunConfig:
    changes = {}
    for name in _FLOAT_FIELDS + _INT_FIELDS:
        value = getattr(config, name)
        kind = float if name in _FLOAT_FIELDS else int
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number, got {value!r}")
        if kind is int and value != int(value):
            raise ConfigError(f"{name} must be an integer, got {value!r}")
        changes[name] = kind(value)
    return replace(config, **changes)


_FLAG_FIELDS = {
    "omega": "omega", "gamma": "gamma", "j": "j", "j_min": "j_min", "j_max": "j_max",
    "steps": "n_steps", "t_max": "t_max", "points": "n_points", "initial": "initial_site",
    "method": "method", "out": "out", "format": "output_format",
    "tolerance_scale": "tolerance_scale",
}


def load_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return data


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            values[name] = value
    try:
        config = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return config.validate(args.command)


def fmt(x) -> str:
    return FLOAT_FORMAT.format(float(x))


def _header(command: str, config: RunConfig) -> list[str]:
    resolved = {k: v for k, v in asdict(config).items() if k != "out"}
    return [
        f"# pttrimmer {__version__} {command}",
        "# config: " + json.dumps(resolved, sort_keys=True),
    ]


def spectrum_rows(config: RunConfig):
    if config.j_min == config.j_max:
        couplings = np.array([config.j_min])
    else:
        couplings = np.linspace(config.j_min, config.j_max, config.n_steps)
    for j in couplings:
        row = phase_diagram_row(SystemParams(config.omega, config.gamma, float(j)))
        e0, ep, em = row.eigenvalues
        yield {
            "j": float(j), "phase": str(row.phase),
            "re_e0": e0.real, "im_e0": e0.imag,
            "re_ep": ep.real, "im_ep": ep.imag,
            "re_em": em.real, "im_em": em.imag,
            "abs_a_plus": row.abs_a_plus,
            "pt_residual_e_plus": row.pt_residuals[1],
        }


SPECTRUM_COLUMNS = ["j", "phase", "re_e0", "im_e0", "re_ep", "im_ep", "re_em", "im_em",
                    "abs_a_plus", "pt_residual_e_plus"]
EVOLVE_COLUMNS = ["t", "p_passive", "p_central", "p_active", "re_alpha", "im_alpha",
                  "re_beta", "im_beta", "re_xi", "im_xi"]


def evolve_rows(config: RunConfig):
    traj = sample_trajectory(config.params, config.initial_site, config.t_max, config.n_points,
                             config.method)
    probs = traj.probabilities
    for t, p, a in zip(traj.times, probs, traj.amplitudes):
        yield {
            "t": t, "p_passive": p[0], "p_central": p[1], "p_active": p[2],
            "re_alpha": a[0].real, "im_alpha": a[0].imag,
            "re_beta": a[1].real, "im_beta": a[1].imag,
            "re_xi": a[2].real, "im_xi": a[2].imag,
        }


def render_csv(command, config, columns, rows) -> str:
    lines = _header(command, config)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in (row[c] for c in columns)))
    return "\n".join(lines) + "\n"


def render_json(command, config, rows) -> str:
    payload = {
        "command": command,
        "version": __version__,
        "config": {k: v for k, v in asdict(config).items() if k != "out"},
        "rows": [{k: (v if isinstance(v, str) else float(fmt(v))) for k, v in row.items()} for row in rows],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_output(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise TrimmerError(f"cannot write {out}: {exc}") from exc
    log.info("wrote %s", out)


def cmd_spectrum(config: RunConfig) -> int:
    rows = list(spectrum_rows(config))
    if config.output_format == "json":
        text = render_json("spectrum", config, rows)
    else:
        text = render_csv("spectrum", config, SPECTRUM_COLUMNS, rows)
    write_output(text, config.out)
    return 0


def cmd_evolve(config: RunConfig) -> int:
    rows = list(evolve_rows(config))
    if config.output_format == "json":
        text = render_json("evolve", config, rows)
    else:
        text = render_csv("evolve", config, EVOLVE_COLUMNS, rows)
    write_output(text, config.out)
    return 0


def cmd_verify(config: RunConfig) -> int:
    report = run_suite(config.params, config.t_max, config.n_points, config.tolerance_scale)
    report["config"] = {k: v for k, v in asdict(config).items() if k != "out"}
    write_output(json.dumps(report, indent=2, sort_keys=True) + "\n", config.out)
    for check in report["checks"]:
        status = "info" if check["informational"] else ("PASS" if check["passed"] else "FAIL")
        log.info("%-4s %s measured=%s tol=%s", status, check["name"], check["measured"], check["tolerance"])
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pttrimmer", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--omega", type=float, help="cavity frequency (units of gamma)")
    common.add_argument("--gamma", type=float, help="gain/loss rate")
    common.add_argument("--j", type=float, help="inter-cavity coupling")
    common.add_argument("--config", help="JSON config file with RunConfig keys")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], help="output format for curves")

    sp = sub.add_parser("spectrum", parents=[common], help="sweep the spectrum over j")
    sp.add_argument("--j-min", type=float)
    sp.add_argument("--j-max", type=float)
    sp.add_argument("--steps", type=int)

    traj = argparse.ArgumentParser(add_help=False)
    traj.add_argument("--t-max", type=float)
    traj.add_argument("--points", type=int)
    traj.add_argument("--initial", choices=["passive", "active"])
    traj.add_argument("--method", choices=["closed", "closed_form", "rk4", "expm", "matrix_exp"])

    sub.add_parser("evolve", parents=[common, traj], help="single-photon occupation curves")
    vp = sub.add_parser("verify", parents=[common, traj], help="run the invariant suite (JSON report)")
    vp.add_argument("--tolerance-scale", type=float,
                    help="multiply every tolerance (0 forces failures; harness self-test)")
    return parser


COMMANDS = {"spectrum": cmd_spectrum, "evolve": cmd_evolve, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = resolve_config(args)
        return COMMANDS[args.command](config)
    except TrimmerError as exc:
        print(f"pttrimmer: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
