"""Command line entry point: ``fracsplit simulate|kernel|decompose|converge``.

Exit status: 0 when the run finished (a blow-up counts as a finished run
and is recorded as ``status = "blew_up"`` in the manifest), 2 for
configuration errors, 3 for runtime numeric errors. Errors are printed to
stderr as a single JSON line.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .errors import ConfigError, FracSplitError, NonFiniteFieldError
from .grid import Field, GridSpec, point_norms, sup_norm
from .kernel import DiffusionParams, closed_form_kernel, synthesize_kernel, tail_exponent
from .peregrine import decay_report, evolve_coupled, project_periodic
from .presets import build_initial, lattice_for
from .reaction import OdeOptions
from .snapshot import atomic_write, fmt, write_binary, write_csv
from .splitting import SplitScheme, estimate_order, evolve

__all__ = ["main", "run_subcommand"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _opts(cfg: RunConfig) -> OdeOptions:
    return OdeOptions(cfg.substeps_per_unit_time, cfg.blowup_threshold)


def _simulate(cfg, out: Path) -> dict:
    u0, _ = build_initial(cfg)
    rep = evolve(u0, cfg.t_end, SplitScheme(cfg.variant, cfg.dt), DiffusionParams(cfg.sigma, cfg.beta),
                 cfg.reaction(), _opts(cfg), stride=cfg.stride)
    files = []
    for i, (t, f) in enumerate(rep.snapshots):
        name = f"snap_{i:05d}.{cfg.output_format}"
        (write_binary if cfg.output_format == "bin" else write_csv)(out / name, f)
        files.append({"file": name, "time": t})
    result = {"status": rep.status, "step_count": rep.step_count, "h": rep.h, "snapshots": files}
    if rep.completed:
        result["final_sup_norm"] = sup_norm(rep.final)
    else:
        result["t_star"] = rep.t_star_estimate
    return result


def _kernel(cfg, out: Path) -> dict:
    params = DiffusionParams(cfg.sigma, cfg.beta)
    grid = GridSpec(cfg.points, cfg.length)
    kern = synthesize_kernel(grid, params, cfg.t_end)
    x, g = kern.centered()
    st = cfg.sigma * cfg.t_end
    exact = closed_form_kernel(cfg.beta, st, x) if cfg.beta in (0.5, 1.0) else None
    rows = [(float(xi), float(gi), "" if exact is None else float(exact[i])) for i, (xi, gi) in enumerate(zip(x, g))]
    atomic_write(out / "kernel.csv", _csv_text(["x", "value", "closed_form"], rows))
    lo, hi = cfg.kernel_window
    try:
        slope = tail_exponent(kern, (lo, hi))
    except ValueError as exc:
        raise ConfigError(f"kernel.window: {exc}") from None
    atomic_write(out / "tail_fit.csv", _csv_text(
        ["beta", "sigma_t", "window_lo", "window_hi", "slope"], [(cfg.beta, st, lo, hi, slope)]))
    return {"status": "completed", "mass": kern.mass, "min_value": float(np.min(g)),
            "tail_slope": slope, "files": ["kernel.csv", "tail_fit.csv"]}


def _decompose(cfg, out: Path) -> dict:
    if cfg.initial_kind != "peregrine_sum":
        raise ConfigError("decompose needs initial.kind = peregrine_sum")
    u0, state = build_initial(cfg)
    lattice = lattice_for(cfg)
    if 2 * cfg.skip_cells >= lattice.box_cells:
        raise ConfigError("decompose.skip_cells must satisfy 2*skip < domain.cells")
    scheme = SplitScheme(cfg.variant, cfg.dt)
    params = DiffusionParams(cfg.sigma, cfg.beta)
    coupled = evolve_coupled(state, cfg.t_end, scheme, params, cfg.reaction(), lattice, _opts(cfg), cfg.stride)
    mono = evolve(u0, cfg.t_end, scheme, params, cfg.reaction(), _opts(cfg), cfg.stride)
    rows = []
    for s, (t, u) in zip(coupled.states, mono.snapshots):
        consistency = float(np.max(point_norms(s.total(lattice).values - u.values)))
        proj = project_periodic(u, lattice, cfg.skip_cells)
        rows.append((t, consistency, decay_report(s, cfg.outer_fraction).outer_sup,
                     float(np.max(point_norms(proj.values - s.v.values)))))
    atomic_write(out / "decompose.csv", _csv_text(
        ["time", "sum_consistency_error", "outer_sup_w", "projector_error"], rows))
    result = {"status": coupled.status if coupled.completed else "blew_up",
              "monolithic_status": mono.status, "rows": len(rows), "files": ["decompose.csv"],
              "max_sum_consistency_error": max(r[1] for r in rows)}
    if not coupled.completed:
        result.update(t_star=coupled.t_star_estimate, component=coupled.component,
                      v_sup=coupled.v_sup, w_sup=coupled.w_sup)
    return result


def _converge(cfg, out: Path) -> dict:
    u0, _ = build_initial(cfg)
    h_list = [cfg.dt / 2**k for k in range(cfg.levels)]
    fit = estimate_order(u0, cfg.t_end, DiffusionParams(cfg.sigma, cfg.beta), cfg.reaction(),
                         cfg.variant, h_list, _opts(cfg))
    slope = "exact" if fit.exact else fit.slope
    rows = [(cfg.variant, h, e, slope) for h, e in zip(fit.h_list, fit.errors)]
    atomic_write(out / "converge.csv", _csv_text(["variant", "h", "sup_error", "slope"], rows))
    return {"status": "completed", "fit": fit.status, "slope": None if fit.exact else fit.slope,
            "files": ["converge.csv"]}


_COMMANDS = {"simulate": _simulate, "kernel": _kernel, "decompose": _decompose, "converge": _converge}


def run_subcommand(name: str, cfg: RunConfig, out_dir=None, stride=None) -> dict:
    """Run one subcommand, write its artifacts and ``manifest.json``; return the manifest."""
    if name not in _COMMANDS:
        raise ConfigError(f"unknown subcommand {name!r}")
    if stride is not None:
        if stride < 1:
            raise ConfigError("--stride must be ≥ 1")
        cfg = RunConfig(**{**cfg.to_dict(), "stride": stride, "source": cfg.source})
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    tic = time.perf_counter()
    result = _COMMANDS[name](cfg, out)
    manifest = {
        "command": name,
        "code_version": __version__,
        "started_utc": started,
        "wall_clock_seconds": time.perf_counter() - tic,
        "config": cfg.to_dict(),
        "config_text": cfg.source,
        **result,
    }
    atomic_write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n")
    return manifest


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not serialisable: {type(obj)}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracsplit",
        description="Splitting solver for fractional reaction-diffusion with periodic + decaying data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "Evolve the configured initial data and write snapshots.",
        "kernel": "Write fractional heat kernel samples and a tail-slope fit.",
        "decompose": "Compare coupled (v, w) evolution with the monolithic solver.",
        "converge": "Estimate the empirical order of the configured splitting variant.",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", default=None, metavar="DIR", help="Override output.dir.")
        p.add_argument("--stride", type=int, default=None, help="Override output.stride.")
    return parser


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"status": "error", "kind": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        return _fail("config", f"cannot read config: {exc}", EXIT_CONFIG)
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    try:
        manifest = run_subcommand(args.command, cfg, args.out, args.stride)
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    except (NonFiniteFieldError, FracSplitError, ArithmeticError, FloatingPointError) as exc:
        return _fail("numeric", str(exc), EXIT_NUMERIC)
    print(json.dumps({"command": args.command, "status": manifest["status"]}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
