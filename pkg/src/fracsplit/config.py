"""Strict parsing of sectioned ``key = value`` run configurations.

Example::

    [domain]
    length = 32.0
    points = 256
    # period/cells are needed by the decompose subcommand and peregrine_sum
    period = 2.0
    cells = 16

    [model]
    sigma = 1.0
    beta = 0.5

    [reaction]
    kind = logistic
    params = 1.0, 1.0

    [scheme]
    variant = lie_full
    dt = 1e-3
    t_end = 2.0

    [initial]
    kind = constant
    params = 0.3

    [output]
    dir = runs/logistic
    stride = 100
    format = bin

Unknown sections and keys are errors, not warnings.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, field

from .errors import ConfigError
from .reaction import KINDS, ReactionSpec
from .splitting import VARIANTS

__all__ = ["RunConfig", "parse_config", "load_config", "INITIAL_KINDS"]

INITIAL_KINDS = ("constant", "cosine", "gaussian_bump", "raised_cosine_bump", "peregrine_sum", "random_bounded")

# key -> (parser, required)
_SCHEMA = {
    "domain": {"length": ("float", True), "points": ("int", True), "period": ("float", False), "cells": ("int", False)},
    "model": {"sigma": ("float", True), "beta": ("float", True)},
    "reaction": {
        "kind": ("str", True),
        "params": ("floats", False),
        "inner_kind": ("str", False),
        "inner_params": ("floats", False),
    },
    "scheme": {
        "variant": ("str", False),
        "dt": ("float", True),
        "t_end": ("float", True),
        "substeps_per_unit_time": ("int", False),
        "blowup_threshold": ("float", False),
        "levels": ("int", False),
    },
    "initial": {"kind": ("str", True), "params": ("floats", False), "seed": ("int", False)},
    "output": {"dir": ("str", False), "stride": ("int", False), "format": ("str", False)},
    "kernel": {"window": ("floats", False)},
    "decompose": {"skip_cells": ("int", False), "outer_fraction": ("float", False)},
}
_REQUIRED_SECTIONS = ("domain", "model", "reaction", "scheme", "initial")


@dataclass(frozen=True)
class RunConfig:
    length: float
    points: int
    sigma: float
    beta: float
    reaction_kind: str
    dt: float
    t_end: float
    initial_kind: str
    reaction_params: tuple = ()
    inner_kind: str | None = None
    inner_params: tuple = ()
    period: float | None = None
    cells: int | None = None
    variant: str = "lie_full"
    substeps_per_unit_time: int = 1000
    blowup_threshold: float = 1e8
    levels: int = 4
    initial_params: tuple = ()
    seed: int | None = None
    output_dir: str = "fracsplit-out"
    stride: int = 1
    output_format: str = "bin"
    kernel_window: tuple = (5.0, 20.0)
    skip_cells: int = 4
    outer_fraction: float = 0.1
    source: str = field(default="", repr=False, compare=False)

    def reaction(self) -> ReactionSpec:
        if self.reaction_kind == "modulated":
            return ReactionSpec("modulated", self.reaction_params, ReactionSpec(self.inner_kind, self.inner_params))
        return ReactionSpec(self.reaction_kind, self.reaction_params)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("source")
        return d


def _convert(path, raw, kind):
    try:
        if kind == "float":
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError
            return val
        if kind == "int":
            return int(raw, 0)
        if kind == "floats":
            return tuple(float(p) for p in raw.replace(",", " ").split())
        return raw.strip()
    except ValueError:
        raise ConfigError(f"{path}: cannot parse {raw!r} as {kind}") from None


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a configuration document."""
    cp = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#",), inline_comment_prefixes=("#",),
        interpolation=None, strict=True, empty_lines_in_values=False,
    )
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}".splitlines()[0]) from None

    values = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            path = f"{section}.{key}"
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {path}")
            values[path] = _convert(path, raw, _SCHEMA[section][key][0])
    for section in _REQUIRED_SECTIONS:
        if not cp.has_section(section):
            raise ConfigError(f"missing section [{section}]")
    for section, keys in _SCHEMA.items():
        for key, (_, required) in keys.items():
            if required and f"{section}.{key}" not in values:
                raise ConfigError(f"missing key {section}.{key}")

    v = values.get
    kw = dict(
        length=v("domain.length"), points=v("domain.points"),
        period=v("domain.period"), cells=v("domain.cells"),
        sigma=v("model.sigma"), beta=v("model.beta"),
        reaction_kind=v("reaction.kind"), reaction_params=v("reaction.params", ()),
        inner_kind=v("reaction.inner_kind"), inner_params=v("reaction.inner_params", ()),
        variant=v("scheme.variant", "lie_full"), dt=v("scheme.dt"), t_end=v("scheme.t_end"),
        substeps_per_unit_time=v("scheme.substeps_per_unit_time", 1000),
        blowup_threshold=v("scheme.blowup_threshold", 1e8), levels=v("scheme.levels", 4),
        initial_kind=v("initial.kind"), initial_params=v("initial.params", ()), seed=v("initial.seed"),
        output_dir=v("output.dir", "fracsplit-out"), stride=v("output.stride", 1),
        output_format=v("output.format", "bin"),
        kernel_window=v("kernel.window", (5.0, 20.0)),
        skip_cells=v("decompose.skip_cells", 4), outer_fraction=v("decompose.outer_fraction", 0.1),
        source=text,
    )
    cfg = RunConfig(**kw)
    _validate(cfg)
    return cfg


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _validate(c: RunConfig):
    def need(ok, msg):
        if not ok:
            raise ConfigError(msg)

    need(c.points >= 8 and c.points % 2 == 0, "domain.points must be even ≥ 8")
    need(c.length > 0, "domain.length must be positive")
    if c.period is not None or c.cells is not None:
        need(c.period is not None and c.cells is not None, "domain.period and domain.cells go together")
        need(c.period > 0, "domain.period must be positive")
        need(c.cells >= 4, "domain.cells must be ≥ 4")
        need(c.points % c.cells == 0, "domain.points must be a multiple of domain.cells")
        need((c.points // c.cells) % 2 == 0 and c.points // c.cells >= 8,
             "domain.points / domain.cells must be even ≥ 8")
        need(math.isclose(c.length, c.period * c.cells, rel_tol=1e-12),
             "domain.length must equal domain.period * domain.cells")
    need(c.sigma >= 0, "model.sigma must be ≥ 0")
    need(0 < c.beta <= 1, "model.beta must lie in (0,1]")
    need(c.reaction_kind in KINDS, f"reaction.kind must be one of {KINDS}")
    if c.reaction_kind == "modulated":
        need(c.inner_kind is not None, "reaction.inner_kind is required for modulated")
    else:
        need(c.inner_kind is None and not c.inner_params,
             "reaction.inner_kind/inner_params only apply to modulated")
    try:
        c.reaction()
    except ValueError as exc:
        raise ConfigError(f"reaction.params: {exc}") from None
    need(c.variant in VARIANTS, f"scheme.variant must be one of {VARIANTS}")
    need(c.dt > 0, "scheme.dt must be positive")
    need(c.t_end > 0, "scheme.t_end must be positive")
    ratio = c.t_end / c.dt
    need(abs(ratio - round(ratio)) <= 0.01 and round(ratio) >= 1,
         "scheme.t_end / scheme.dt must be within 1% of an integer")
    need(c.substeps_per_unit_time >= 1, "scheme.substeps_per_unit_time must be ≥ 1")
    need(c.blowup_threshold > 0, "scheme.blowup_threshold must be positive")
    need(c.levels >= 3, "scheme.levels must be ≥ 3")
    need(c.initial_kind in INITIAL_KINDS, f"initial.kind must be one of {INITIAL_KINDS}")
    if c.initial_kind == "random_bounded":
        need(c.seed is not None, "initial.seed is mandatory for random_bounded")
    if c.seed is not None:
        need(0 <= c.seed < 2**64, "initial.seed must be a 64-bit unsigned integer")
    if c.initial_kind == "peregrine_sum":
        need(c.period is not None, "peregrine_sum needs domain.period and domain.cells")
    need(c.stride >= 1, "output.stride must be ≥ 1")
    need(c.output_format in ("csv", "bin"), "output.format must be csv or bin")
    need(len(c.kernel_window) == 2 and 0 < c.kernel_window[0] < c.kernel_window[1],
         "kernel.window must be two increasing positive numbers")
    need(c.skip_cells >= 0, "decompose.skip_cells must be ≥ 0")
    need(0 < c.outer_fraction <= 0.25, "decompose.outer_fraction must lie in (0,0.25]")
