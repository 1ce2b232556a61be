"""Command-line interface.

Usage:
    riccati-catalan catalan --n-max 5
    riccati-catalan stationary --i-max 10 --format json
    riccati-catalan finite --n-players 8 --method all --output finite.csv
    riccati-catalan infinite --k-max 8 --method spectral
    riccati-catalan converge --k-max 4 --n-list 16,32,64,128,256
    riccati-catalan spectrum --n-players 4 --eps 2
    riccati-catalan genfun --n-times 11 --m-points 64

Exit status: 0 on success, 2 for invalid configuration, 3 when a solver
fails, 4 on I/O errors.  Identical flags give byte-identical output.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .catalan import catalan_sequence, stationary_solution
from .convergence import DEFAULT_N_LIST, convergence_report
from .errors import CatalanOverflowError, DomainError, RiccatiError
from .finite import solve_direct, solve_matrix, solve_spectral
from .highprec import DEFAULT_PREC_BITS
from .infinite import fourier_coefficients_grid, solve_triangular
from .scalar import RiccatiParams, generating_function, m_eigenvalues
from .tables import emit_table

__all__ = ["RunConfig", "run", "main", "build_parser"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

COMMANDS = ("catalan", "stationary", "finite", "infinite", "converge", "spectrum", "genfun")
METHODS = ("direct", "spectral", "matrix", "all")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    eps: float = 1.0
    c: float = 1.0
    t_final: float = 1.0
    n_players: int = 4
    k_max: int | None = None
    n_steps: int = 1000
    m_points: int = 256
    n_list: tuple[int, ...] = DEFAULT_N_LIST
    method: str = "spectral"
    output_path: str | None = None
    format: str = "csv"
    n_max: int = 10
    i_max: int = 10
    n_times: int = 11
    radius: float = 0.5
    prec_bits: int | None = DEFAULT_PREC_BITS
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        """Raise :class:`ConfigError` naming the offending flag and its valid range."""

        def need(ok, flag, rule, value):
            if not ok:
                raise ConfigError(f"{flag} must be {rule}, got {value!r}")

        need(self.command in COMMANDS, "command", f"one of {', '.join(COMMANDS)}", self.command)
        for flag, value in (("--eps", self.eps), ("--t-final", self.t_final)):
            need(math.isfinite(value) and value > 0, flag, "a finite real > 0", value)
        need(math.isfinite(self.c) and self.c >= 0, "--c", "a finite real >= 0", self.c)
        need(self.n_players >= 2, "--n-players", "an integer >= 2", self.n_players)
        need(self.n_steps >= 10, "--n-steps", "an integer >= 10", self.n_steps)
        need(self.m_points >= 16, "--m-points", "an integer >= 16", self.m_points)
        need(self.method in METHODS, "--method", f"one of {', '.join(METHODS)}", self.method)
        need(self.format in ("csv", "json"), "--format", "csv or json", self.format)
        need(self.n_max >= 0, "--n-max", "an integer >= 0", self.n_max)
        need(self.i_max >= 0, "--i-max", "an integer >= 0", self.i_max)
        need(self.n_times >= 2, "--n-times", "an integer >= 2", self.n_times)
        need(0 < self.radius < 1, "--radius", "a real in (0, 1)", self.radius)
        need(
            self.prec_bits is None or self.prec_bits >= 64,
            "--prec-bits",
            "an integer >= 64",
            self.prec_bits,
        )
        n_list = list(self.n_list)
        need(
            bool(n_list) and all(n >= 2 for n in n_list) and n_list == sorted(set(n_list)),
            "--n-list",
            "a strictly increasing list of integers >= 2",
            ",".join(map(str, n_list)),
        )
        if self.k_max is not None:
            need(self.k_max >= 0, "--k-max", "an integer >= 0", self.k_max)
        if self.command == "infinite":
            need(self.method != "matrix", "--method", "direct, spectral or all for infinite", self.method)
            if self.method in ("spectral", "all"):
                need(
                    self.m_points >= 4 * (self.resolved_k_max() + 1),
                    "--m-points",
                    f"an integer >= 4*(k_max+1) = {4 * (self.resolved_k_max() + 1)}",
                    self.m_points,
                )
        if self.command == "converge":
            limit = min(n_list) - 1
            need(
                self.resolved_k_max() <= limit,
                "--k-max",
                f"an integer in [0, {limit}] (min of --n-list minus 1)",
                self.resolved_k_max(),
            )

    def resolved_k_max(self) -> int:
        if self.k_max is not None:
            return self.k_max
        return 4 if self.command == "converge" else 8

    def params(self) -> RiccatiParams:
        return RiccatiParams(eps=self.eps, c=self.c, t_final=self.t_final)

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("extra")
        out["n_list"] = list(self.n_list)
        return out


# ---------------------------------------------------------------- commands


def _solution_rows(grid, values, method=None):
    rows = []
    for m, t in enumerate(grid):
        for i, v in enumerate(values[m]):
            row = [float(t), i, float(v)]
            if method is not None:
                row.append(method)
            rows.append(row)
    return rows


def _cmd_catalan(cfg):
    seq = catalan_sequence(cfg.n_max)
    return ["n", "C_n"], [[n, c] for n, c in enumerate(seq.values)], {}


def _cmd_stationary(cfg):
    sol = stationary_solution(cfg.i_max)
    return ["i", "phi_i"], [[i, float(v)] for i, v in enumerate(sol.values)], {}


def _cmd_finite(cfg):
    params = cfg.params()
    n = cfg.n_players
    solvers = {
        "direct": lambda: solve_direct(params, n, cfg.n_steps),
        "spectral": lambda: solve_spectral(params, n, cfg.n_steps)[0],
        "matrix": lambda: solve_matrix(params, n, params.t_final / cfg.n_steps),
    }
    if cfg.method != "all":
        sol = solvers[cfg.method]()
        return ["t", "index", "value"], _solution_rows(sol.time_grid, sol.values), {}
    sols = {name: make() for name, make in solvers.items()}
    rows = []
    for name, sol in sols.items():
        rows.extend(_solution_rows(sol.time_grid, sol.values, name))
    names = list(sols)
    agreement = [
        [a, b, float(np.max(np.abs(sols[a].values - sols[b].values)))]
        for k, a in enumerate(names)
        for b in names[k + 1 :]
    ]
    return ["t", "index", "value", "method"], rows, {"agreement": agreement}


def _cmd_infinite(cfg):
    params = cfg.params()
    k_max = cfg.resolved_k_max()
    routes = {
        "direct": lambda: solve_triangular(params, k_max, cfg.n_steps),
        "spectral": lambda: fourier_coefficients_grid(params, k_max, cfg.n_steps, cfg.m_points),
    }
    if cfg.method != "all":
        sol = routes[cfg.method]()
        return ["t", "index", "value"], _solution_rows(sol.time_grid, sol.values), {}
    sols = {name: make() for name, make in routes.items()}
    rows = []
    for name, sol in sols.items():
        rows.extend(_solution_rows(sol.time_grid, sol.values, name))
    gap = float(np.max(np.abs(sols["direct"].values - sols["spectral"].values)))
    return ["t", "index", "value", "method"], rows, {"agreement": [["direct", "spectral", gap]]}


def _cmd_converge(cfg):
    report = convergence_report(
        cfg.params(), cfg.resolved_k_max(), cfg.n_list, cfg.n_steps, cfg.prec_bits
    )
    rows = [
        [n, report.uniform_gaps[n], g.c_n1, g.int_c_n2, g.bound]
        for n, g in report.gronwall.items()
    ]
    return ["N", "D_N", "c_N1", "int_c_N2", "bound"], rows, {"decay_rate": report.decay_rate}


def _cmd_spectrum(cfg):
    lams = m_eigenvalues(cfg.params(), cfg.n_players)
    rows = [[k, float(z.real), float(z.imag), float(abs(z))] for k, z in enumerate(lams)]
    return ["k", "re_lambda", "im_lambda", "modulus"], rows, {}


def _cmd_genfun(cfg):
    params = cfg.params()
    times = np.linspace(0.0, params.t_final, cfg.n_times)
    z = cfg.radius * np.exp(2j * np.pi * np.arange(cfg.m_points) / cfg.m_points)
    rows = []
    for t in times:
        values = generating_function(params, float(t), z)
        for zi, s in zip(z, values):
            rows.append([float(t), float(zi.real), float(zi.imag), float(s.real), float(s.imag)])
    return ["t", "re_z", "im_z", "re_S", "im_S"], rows, {}


_DISPATCH = {
    "catalan": _cmd_catalan,
    "stationary": _cmd_stationary,
    "finite": _cmd_finite,
    "infinite": _cmd_infinite,
    "converge": _cmd_converge,
    "spectrum": _cmd_spectrum,
    "genfun": _cmd_genfun,
}


def _agreement_path(path: str, fmt: str) -> str:
    return f"{path}.agreement.{fmt}"


def run(config: RunConfig) -> int:
    """Validate, compute and write; returns the process exit status."""
    try:
        config.validate()
    except ConfigError as exc:
        print(f"riccati-catalan: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        columns, rows, extra = _DISPATCH[config.command](config)
    except (DomainError, ConfigError) as exc:
        print(f"riccati-catalan: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RiccatiError, CatalanOverflowError, ArithmeticError, FloatingPointError) as exc:
        print(f"riccati-catalan: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    meta = {"command": config.command, "config": config.echo(), "tool_version": __version__}
    meta.update(extra)
    try:
        emit_table(columns, rows, config.format, config.output_path, meta)
        if "agreement" in extra:
            agree_cols = ["method_a", "method_b", "max_abs_diff"]
            if config.output_path is None:
                for a, b, d in extra["agreement"]:
                    print(f"max |{a} - {b}| = {d:.3e}", file=sys.stderr)
            else:
                emit_table(
                    agree_cols,
                    extra["agreement"],
                    config.format,
                    _agreement_path(config.output_path, config.format),
                    meta,
                )
    except OSError as exc:
        print(f"riccati-catalan: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


# ---------------------------------------------------------------- argument parsing


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers such as 8,16,32, got {text!r}"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps", type=float, default=1.0, help="forcing eps > 0")
    common.add_argument("--c", type=float, default=1.0, help="terminal weight c >= 0")
    common.add_argument("--t-final", type=float, default=1.0, help="horizon T > 0")
    common.add_argument("--n-players", type=int, default=4, help="system size N >= 2")
    common.add_argument("--k-max", type=int, default=None, help="highest index (default 8; 4 for converge)")
    common.add_argument("--n-steps", type=int, default=1000, help="time steps on [0, T], >= 10")
    common.add_argument("--m-points", type=int, default=256, help="quadrature / circle sample count, >= 16")
    common.add_argument("--n-list", type=_int_list, default=DEFAULT_N_LIST, help="system sizes, e.g. 8,16,32")
    common.add_argument("--method", choices=METHODS, default="spectral")
    common.add_argument("--output", dest="output_path", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(
        prog="riccati-catalan",
        description="Finite and infinite Riccati systems behind the Catalan functions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("catalan", parents=[common], help="Catalan numbers C_0..C_n")
    p.add_argument("--n-max", type=int, default=10)
    p = sub.add_parser("stationary", parents=[common], help="stationary solution for eps = 1")
    p.add_argument("--i-max", type=int, default=10)
    sub.add_parser("finite", parents=[common], help="N-player periodic system")
    sub.add_parser("infinite", parents=[common], help="Catalan functions (direct = triangular, spectral = Fourier)")
    p = sub.add_parser("converge", parents=[common], help="uniform gaps and Gronwall bounds per N")
    p.add_argument("--prec-bits", type=int, default=DEFAULT_PREC_BITS, help="working precision in bits")
    p.add_argument("--float64", action="store_true", help="measure in double precision instead")
    sub.add_parser("spectrum", parents=[common], help="eigenvalues of the block matrix M")
    p = sub.add_parser("genfun", parents=[common], help="generating function on a circle |z| = radius")
    p.add_argument("--n-times", type=int, default=11)
    p.add_argument("--radius", type=float, default=0.5)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    values = vars(ns).copy()
    if values.pop("float64", False):
        values["prec_bits"] = None
    known = set(RunConfig.__dataclass_fields__)
    return RunConfig(**{k: v for k, v in values.items() if k in known})


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
