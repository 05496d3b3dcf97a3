"""Command line: ``derive-params``, ``solve``, ``sweep`` and ``check``.

Configuration comes from a figure preset, then a flat ``key = value`` file
(``--config``), then ``key=value`` arguments on the command line, each layer
overriding the previous one.  Unknown keys are rejected.

Exit status: 0 success, 2 configuration error, 3 numerical failure (a
pipeline error or a residual check above its tolerance).
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, SolverError
from .field import radius_nodes, theta_nodes
from .jacobi import ZETA0
from .params import PhysicalInputs, derive_params
from .pipeline import Solution, residual_battery, solve
from .presets import FIGURE_IDS, figure_preset

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

INPUT_KEYS = tuple(f.name for f in fields(PhysicalInputs))


@dataclass(frozen=True)
class RunConfig:
    inputs: PhysicalInputs
    tau: complex | None = None
    zeta0: complex = ZETA0
    nodes: int | None = None
    field_nodes: int | None = None
    sweep: str = "theta"  # "theta" or "r"
    r: float = 5.0
    thetas: tuple = ()
    resolution: int | None = None
    r_min: float = 1.0
    r_max: float = 10.0
    figure: int | None = None

    def as_items(self) -> list[tuple[str, str]]:
        items = [(k, _fmt_value(v)) for k, v in asdict(self.inputs).items()]
        for key in ("tau", "zeta0", "nodes", "field_nodes", "sweep", "r", "thetas", "resolution", "r_min", "r_max", "figure"):
            items.append((key, _fmt_value(getattr(self, key))))
        return items


RUN_KEYS = tuple(f.name for f in fields(RunConfig) if f.name != "inputs")


def _fmt_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, tuple):
        return ";".join(_fmt_value(x) for x in v)
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+.17g}j"
    if isinstance(v, float):
        return repr(v)
    return str(v)


# --- parsing -----------------------------------------------------------------

def _number(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(text)
    return v


def _complex(text: str) -> complex:
    return complex(text.strip().replace(" ", "").replace("i", "j"))


def _parse_value(key: str, text: str):
    text = text.strip()
    try:
        if key in ("tau",):
            return None if text.lower() == "none" else _complex(text)
        if key == "zeta0":
            return _complex(text)
        if key in ("nodes", "field_nodes", "resolution", "figure"):
            if text.lower() == "none":
                return None
            v = int(text)
            if v <= 0:
                raise ValueError(text)
            return v
        if key == "sweep":
            if text not in ("theta", "r"):
                raise ValueError(text)
            return text
        if key == "thetas":
            return tuple(_number(x) for x in text.replace(",", ";").split(";") if x.strip())
        return _number(text)
    except ValueError:
        raise ConfigError(f"invalid value for '{key}': {text!r}") from None


def parse_assignments(lines, source: str) -> dict:
    out = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in INPUT_KEYS and key not in RUN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key '{key}'")
        out[key] = _parse_value(key, val)
    return out


def read_config(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_assignments(text.splitlines(), str(path))


def build_config(figure: int | None, config_path=None, overrides=(), nodes=None) -> RunConfig:
    if figure is not None and figure not in FIGURE_IDS:
        raise ConfigError(f"unknown figure {figure}; choose one of {FIGURE_IDS}")
    preset = figure_preset(figure if figure is not None else 3)
    values = {
        "sweep": preset.kind,
        "r": preset.r,
        "thetas": preset.thetas,
        "r_min": preset.r_min,
        "r_max": preset.r_max,
        "tau": preset.tau,
        "figure": figure,
    }
    values.update(asdict(preset.inputs))
    if config_path:
        values.update(read_config(config_path))
    values.update(parse_assignments(overrides, "command line"))
    if nodes is not None:
        values["nodes"] = nodes
    inputs = {k: values.pop(k) for k in INPUT_KEYS}
    try:
        phys = PhysicalInputs(**inputs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg = RunConfig(inputs=phys, **values)
    if cfg.r <= 0 or cfg.r_min <= 0 or cfg.r_max <= cfg.r_min:
        raise ConfigError("radii must satisfy 0 < r_min < r_max and r > 0")
    if cfg.sweep == "r" and not cfg.thetas:
        raise ConfigError("an r-sweep needs 'thetas'")
    if cfg.sweep == "theta" and cfg.resolution is not None and cfg.resolution % 2:
        raise ConfigError("'resolution' of a theta-sweep must be even")
    return cfg


# --- reports -----------------------------------------------------------------

def _c(z: complex) -> str:
    return f"{z.real:.10g}{z.imag:+.10g}i"


def params_report(cfg: RunConfig) -> list[str]:
    p = derive_params(cfg.inputs, tau_override=cfg.tau)
    s1, s2 = p.branch_points
    return [
        f"k       = {_c(p.k)}",
        f"theta0  = {p.theta0:.10g}",
        f"tau     = {_c(p.tau)}",
        f"mu      = {_c(p.mu)}",
        f"alpha   = {_c(p.alpha)}",
        f"m       = {_c(p.m)}",
        f"k_res   = {p.k_res:.10g}",
        f"s1      = {_c(s1)}",
        f"s2      = {_c(s2)}",
    ]


def solution_report(sol: Solution, checks) -> list[str]:
    p, surf, jac, c = sol.params, sol.surface, sol.jacobi, sol.solver.constants
    lines = [
        f"tau     = {_c(p.tau)}",
        f"s1      = {_c(surf.s1)}",
        f"s2      = {_c(surf.s2)}",
        f"A       = {_c(surf.A)}",
        f"B       = {_c(surf.B)}",
        f"Bhat    = {_c(surf.Bhat)}",
        f"zeta1   = {_c(jac.zeta1)}  (sheet {jac.sheet1})",
        f"m_a     = {jac.m_a}",
        f"m_b     = {jac.m_b}",
        f"h0      = {_c(sol.factors.h0)}",
        f"C       = {_c(c.C)}",
        f"N       = {_c(c.N)}",
        f"nodes   = {sol.nodes}",
        "",
        f"{'check':<22}{'value':>12}{'tolerance':>12}  status",
    ]
    for ch in checks:
        status = "ok" if ch.passed else ("FAIL" if ch.gating else "above tol (info)")
        lines.append(f"{ch.name:<22}{ch.value:>12.3e}{ch.tolerance:>12.1e}  {status}")
    lines.extend(f"note: {n}" for n in sol.notes)
    return lines


# --- sweeps ------------------------------------------------------------------

def _csv_header(cfg: RunConfig, extra=()) -> list[str]:
    meta = [f"# panelscatter {__version__}"]
    meta += [f"# {k} = {v}" for k, v in cfg.as_items()]
    meta += [f"# {line}" for line in extra]
    return meta


def run_sweep(sol: Solution, cfg: RunConfig) -> list[tuple[str, list[str]]]:
    """CSV documents as ``(suffix, lines)``; one per angle for an r-sweep."""
    field = sol.field
    p = sol.params
    extra = [f"nodes_used = {sol.nodes}", f"field_nodes_used = {field.rule.n}"]
    extra += [f"{name}_derived = {_fmt_value(complex(getattr(p, name)))}" for name in ("k", "tau", "mu", "alpha", "m")]
    if cfg.sweep == "theta":
        th = theta_nodes(cfg.resolution or 720)
        P = field.P(np.full(th.shape, cfg.r), th)
        body = [f"{a:.12e},{b:.12e}" for a, b in zip(th, P)]
        return [("", _csv_header(cfg, extra + [f"r_m = {cfg.r!r}"]) + ["theta_rad,P"] + body)]
    rs = radius_nodes(cfg.resolution or 500, cfg.r_min, cfg.r_max)
    docs = []
    for i, th in enumerate(cfg.thetas):
        P = field.P(rs, np.full(rs.shape, th))
        body = [f"{a:.12e},{b:.12e}" for a, b in zip(rs, P)]
        suffix = "" if len(cfg.thetas) == 1 else f"_theta{i + 1}"
        docs.append((suffix, _csv_header(cfg, extra + [f"theta_rad = {th!r}"]) + ["r_m,P"] + body))
    return docs


def _with_suffix(path: Path, suffix: str) -> Path:
    return path if not suffix else path.with_name(path.stem + suffix + path.suffix)


def write_sweep(docs, out: Path) -> list[Path]:
    written = []
    for suffix, lines in docs:
        target = _with_suffix(out, suffix)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text("\n".join(lines) + "\n")
        written.append(target)
    return written


def plot_sweep(paths, target: Path):
    try:
        import matplotlib
    except ImportError:
        raise ConfigError("--plot needs matplotlib (pip install 'artifact[plot]')") from None

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for path in paths:
        rows = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
        label = rows[0].split(",")[0]
        x, y = np.array([[float(v) for v in ln.split(",")] for ln in rows[1:]]).T
        ax.plot(x, y, lw=1, label=path.stem)
    ax.set_xlabel("theta [rad]" if label == "theta_rad" else "r [m]")
    ax.set_ylabel("P")
    if len(paths) > 1:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(target, dpi=120, metadata={"Software": None})
    plt.close(fig)


# --- entry point -------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="panelscatter", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("derive-params", "print the derived complex parameters"),
        ("solve", "solve and print a report with the residual table"),
        ("sweep", "solve and write P along a theta- or r-sweep as CSV"),
        ("check", "run the residual battery only"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--figure", type=int, help="figure preset (3..9)")
        p.add_argument("--config", help="key = value file")
        p.add_argument("--out", help="output path (report, or CSV for sweeps)")
        p.add_argument("--nodes", type=int, help="circle-grid knot parameter n")
        p.add_argument("overrides", nargs="*", metavar="key=value", help="config overrides")
        if name in ("solve", "sweep"):
            p.add_argument("--plot", action="store_true", help="also write a PNG next to the CSV")
            p.add_argument("--sweep", choices=("theta", "r"), help="sweep kind (solve: also write a CSV)")
            p.add_argument("--r", type=float, help="radius of a theta-sweep")
    return ap


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    out = Path(args.out) if args.out else None
    try:
        overrides = list(args.overrides)
        if getattr(args, "sweep", None):
            overrides.append(f"sweep={args.sweep}")
        if getattr(args, "r", None) is not None:
            overrides.append(f"r={args.r!r}")
        cfg = build_config(args.figure, args.config, overrides, args.nodes)
        if args.command == "derive-params":
            _emit(params_report(cfg), out)
            return EXIT_OK
        sol = solve(cfg.inputs, tau=cfg.tau, nodes=cfg.nodes, field_nodes=cfg.field_nodes, zeta0=cfg.zeta0)
        code = EXIT_OK
        if args.command in ("solve", "check"):
            checks = residual_battery(sol)
            if any(c.gating and not c.passed for c in checks):
                code = EXIT_NUMERIC
            lines = solution_report(sol, checks)
            if args.command == "check":
                lines = lines[lines.index("") + 1:]
            report_target = None if (args.command == "solve" and args.sweep) else out
            _emit(lines, report_target)
        if args.command == "sweep" or (args.command == "solve" and args.sweep):
            target = out or Path(f"sweep_fig{cfg.figure or 'custom'}.csv")
            written = write_sweep(run_sweep(sol, cfg), target)
            for path in written:
                print(f"wrote {path}")
            if args.plot:
                png = target.with_suffix(".png")
                plot_sweep(written, png)
                print(f"wrote {png}")
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"{exc.stage}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def _emit(lines, out: Path | None):
    text = "\n".join(lines) + "\n"
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    sys.stdout.write(text)


if __name__ == "__main__":
    raise SystemExit(main())
