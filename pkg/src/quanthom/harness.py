"""Experiment driver: scaling studies and the small-BMO probe.

A scaling run sweeps a map-family parameter, computes the invariant and
a fractional seminorm per sweep value, and checks the bound

    |invariant| <= C * seminorm^{(N+L)/beta}

empirically: the observed ratios must stay within a factor of 3 of
their median and the fitted log-log slope must not exceed the
theoretical exponent by more than 15%.  Rows with beta at or below the
structure's threshold are never granted a PASS; they are tagged
informational (an explicit override is required to run them at all).

Configs are flat INI text (sections in brackets, key = value, lists
comma-separated); reports serialize losslessly to JSON and CSV and are
byte-reproducible for a fixed seed (timestamp field aside).
"""

from __future__ import annotations

import configparser
import csv
import datetime
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .geometry import build_sphere_mesh
from .invariants import hardt_riviere
from .maps import parse_map_spec
from .registry import lookup
from .seminorms import (bmo_seminorm, holder_seminorm,
                        poisson_extension_distance, sobolev_seminorm, _rng,
                        _uniform_sphere)

RATIO_SPREAD_LIMIT = 3.0
SLOPE_MARGIN = 1.15


class ConfigError(ValueError):
    pass


def _parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


def _parse_sweep(text: str):
    """`d=1..8` or `eps=0.02,0.05,0.1` -> (name, values)."""
    name, _, body = text.partition("=")
    if not body:
        raise ConfigError(f"bad sweep {text!r}")
    name = name.strip()
    body = body.strip()
    if ".." in body:
        lo, hi = body.split("..")
        return name, [int(x) for x in range(int(lo), int(hi) + 1)]
    vals = [v.strip() for v in body.split(",")]
    try:
        return name, sorted(int(v) for v in vals)
    except ValueError:
        return name, sorted(float(v) for v in vals)


@dataclass
class ExperimentConfig:
    kind: str                      # "scaling" | "bmo"
    structure: str
    map_template: str              # e.g. "circle-power:d={d}"
    sweep_name: str
    sweep_values: list
    betas: list                    # Fractions
    levels: list                   # mesh levels, ascending
    seminorm: str = "sobolev"
    samples: int = 200_000
    seed: int = 0
    allow_beta_below_threshold: bool = False
    outputs: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        cp = configparser.ConfigParser()
        read = cp.read(path)
        if not read:
            raise ConfigError(f"cannot read config file {path!r}")
        return cls.from_parser(cp)

    @classmethod
    def from_string(cls, text: str) -> "ExperimentConfig":
        cp = configparser.ConfigParser()
        cp.read_string(text)
        return cls.from_parser(cp)

    @classmethod
    def from_parser(cls, cp: configparser.ConfigParser) -> "ExperimentConfig":
        try:
            sec = cp["experiment"]
            kind = sec.get("kind", "scaling").strip()
            structure = sec["structure"].strip()
            template = sec["map"].strip()
            sweep_name, sweep_values = _parse_sweep(sec["sweep"])
            betas = [_parse_fraction(b) for b in sec.get("beta", "1").split(",")]
            levels = sorted(int(x) for x in sec.get("levels", "3").split(","))
            seminorm = sec.get("seminorm", "sobolev").strip()
            samples = sec.getint("samples", 200_000)
            seed = sec.getint("seed", 0)
            allow = sec.getboolean("allow_beta_below_threshold", False)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad experiment config: {exc}") from exc
        outputs = dict(cp["output"]) if cp.has_section("output") else {}
        cfg = cls(kind, structure, template, sweep_name, sweep_values, betas,
                  levels, seminorm, samples, seed, allow, outputs)
        cfg.validate()
        return cfg

    def validate(self):
        if self.kind not in ("scaling", "bmo"):
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.seminorm not in ("sobolev", "holder"):
            raise ConfigError(f"unknown seminorm kind {self.seminorm!r}")
        entry = lookup(self.structure)
        b0 = entry.report.effective_beta0()
        low = [b for b in self.betas if b <= b0]
        if low and not self.allow_beta_below_threshold:
            raise ConfigError(
                f"beta values {low} do not exceed the threshold {b0} of "
                f"{self.structure!r}; set allow_beta_below_threshold to run "
                f"them as informational rows")

    def echo(self) -> dict:
        return {
            "kind": self.kind, "structure": self.structure,
            "map": self.map_template, "sweep_name": self.sweep_name,
            "sweep_values": list(self.sweep_values),
            "beta": [str(b) for b in self.betas],
            "levels": list(self.levels), "seminorm": self.seminorm,
            "samples": self.samples, "seed": self.seed,
            "allow_beta_below_threshold": self.allow_beta_below_threshold,
        }


# ----------------------------------------------------------------------
# scaling study
# ----------------------------------------------------------------------

def _evaluate_invariant(map_spec: str, structure, levels) -> tuple:
    """Invariant at the finest level with a level-difference error bar."""
    f = parse_map_spec(map_spec)
    vals = []
    residuals = {}
    for lvl in levels[-2:]:
        mesh = build_sphere_mesh(structure.domain_dim, lvl)
        res = hardt_riviere(f, structure, mesh)
        vals.append(res.value)
        residuals[f"level{lvl}"] = res.residuals
    err = abs(vals[-1] - vals[0]) if len(vals) > 1 else 0.0
    return vals[-1], err, residuals


def _weighted_slope(xs, ys, sx, sy, prior_slope):
    """Least squares slope of y on x with both-variable errors folded in."""
    xs, ys = np.asarray(xs), np.asarray(ys)
    var = np.asarray(sy) ** 2 + (prior_slope * np.asarray(sx)) ** 2
    w = 1.0 / np.maximum(var, 1e-12)
    xm = (w * xs).sum() / w.sum()
    ym = (w * ys).sum() / w.sum()
    sxx = (w * (xs - xm) ** 2).sum()
    if sxx <= 0:
        return None, None
    slope = float((w * (xs - xm) * (ys - ym)).sum() / sxx)
    stderr = float(np.sqrt(1.0 / sxx))
    return slope, stderr


@dataclass
class ScalingRow:
    parameter: object
    map_spec: str
    invariant: float
    invariant_err: float
    seminorm: float
    seminorm_err: float
    ratio: float
    ratio_err: float
    error: str = ""

    def as_dict(self):
        return {k: getattr(self, k) for k in
                ("parameter", "map_spec", "invariant", "invariant_err",
                 "seminorm", "seminorm_err", "ratio", "ratio_err", "error")}


@dataclass
class ScalingBlock:
    beta: Fraction
    exponent: Fraction
    hypothesis_ok: bool
    rows: list
    slope: float | None = None
    slope_stderr: float | None = None
    ratios_bounded: bool = False
    slope_ok: bool = False
    passed: bool = False
    tag: str = ""

    def as_dict(self):
        return {"beta": str(self.beta), "exponent": str(self.exponent),
                "hypothesis_ok": self.hypothesis_ok,
                "rows": [r.as_dict() for r in self.rows],
                "slope": self.slope, "slope_stderr": self.slope_stderr,
                "ratios_bounded": self.ratios_bounded,
                "slope_ok": self.slope_ok, "passed": self.passed,
                "tag": self.tag}


@dataclass
class Report:
    kind: str
    config: dict
    blocks: list
    passed: bool
    versions: dict = field(default_factory=dict)
    timestamp: str = ""

    def as_dict(self):
        return {"kind": self.kind, "config": self.config,
                "blocks": [b.as_dict() for b in self.blocks],
                "passed": self.passed, "versions": self.versions,
                "timestamp": self.timestamp}


def _versions() -> dict:
    import scipy

    from . import __version__
    return {"quanthom": __version__, "numpy": np.__version__,
            "scipy": scipy.__version__}


def run_scaling(config: ExperimentConfig) -> Report:
    """Sweep the family parameter and test the scaling inequality."""
    entry = lookup(config.structure)
    structure = entry.structure
    if not entry.evaluable:
        raise ConfigError(f"structure {config.structure!r} is not "
                          f"numerically evaluable")
    b0 = entry.report.effective_beta0()
    blocks = []
    for beta in config.betas:
        E = entry.report.exponent(beta)
        Ef = float(E)
        hypothesis_ok = beta > b0
        rows = []
        for i, val in enumerate(config.sweep_values):
            spec = config.map_template.format(**{config.sweep_name: val})
            try:
                inv, inv_err, _ = _evaluate_invariant(spec, structure,
                                                      config.levels)
                f = parse_map_spec(spec)
                if config.seminorm == "sobolev":
                    p = structure.domain_dim / float(beta)
                    est = sobolev_seminorm(f, float(beta), p,
                                           samples=config.samples,
                                           seed=config.seed + 1000 * i)
                else:
                    est = holder_seminorm(f, float(beta),
                                          samples=config.samples,
                                          seed=config.seed + 1000 * i)
                s, ds = est.value, est.error
                ratio = abs(inv) / s ** Ef if s > 0 else 0.0
                rel = 0.0
                if s > 0:
                    rel = np.hypot(inv_err / max(abs(inv), 1e-300),
                                   Ef * ds / s)
                rows.append(ScalingRow(val, spec, inv, inv_err, s, ds,
                                       ratio, ratio * rel))
            except Exception as exc:   # row failures recorded, run continues
                rows.append(ScalingRow(val, spec, np.nan, np.nan, np.nan,
                                       np.nan, np.nan, np.nan, error=str(exc)))
        block = ScalingBlock(beta, E, hypothesis_ok, rows)
        good = [r for r in rows if not r.error and abs(r.invariant) > 1e-9
                and r.seminorm > 0]
        if good:
            ratios = np.array([r.ratio for r in good])
            med = float(np.median(ratios))
            block.ratios_bounded = bool(
                med > 0 and ratios.max() <= RATIO_SPREAD_LIMIT * med
                and ratios.min() >= med / RATIO_SPREAD_LIMIT)
            if len(good) >= 2:
                xs = [np.log(r.seminorm) for r in good]
                ys = [np.log(abs(r.invariant)) for r in good]
                sx = [r.seminorm_err / r.seminorm for r in good]
                sy = [r.invariant_err / abs(r.invariant) for r in good]
                block.slope, block.slope_stderr = _weighted_slope(
                    xs, ys, sx, sy, Ef)
                block.slope_ok = (block.slope is not None
                                  and block.slope <= Ef * SLOPE_MARGIN)
            else:
                block.slope_ok = True
        any_error = any(r.error for r in rows)
        block.passed = (hypothesis_ok and block.ratios_bounded
                        and block.slope_ok and not any_error)
        if not hypothesis_ok:
            block.tag = "outside theorem hypothesis"
        blocks.append(block)
    passed = all(b.passed for b in blocks if b.hypothesis_ok) and \
        any(b.hypothesis_ok for b in blocks)
    return Report("scaling", config.echo(), blocks, passed, _versions(),
                  _now())


# ----------------------------------------------------------------------
# BMO / Poisson probe
# ----------------------------------------------------------------------

@dataclass
class BmoRow:
    parameter: object
    map_spec: str
    bmo: float
    bmo_err: float
    max_extension_distance: float
    invariant: float
    ratio: float                    # distance / bmo
    error: str = ""

    def as_dict(self):
        return {k: getattr(self, k) for k in
                ("parameter", "map_spec", "bmo", "bmo_err",
                 "max_extension_distance", "invariant", "ratio", "error")}


@dataclass
class BmoBlock:
    rows: list
    ratio_stable: bool = False
    invariants_integral: bool = False
    passed: bool = False

    def as_dict(self):
        return {"rows": [r.as_dict() for r in self.rows],
                "ratio_stable": self.ratio_stable,
                "invariants_integral": self.invariants_integral,
                "passed": self.passed}


def _probe_points(N: int, seed: int, n_dirs: int = 4,
                  radii=(0.3, 0.6, 0.85)) -> np.ndarray:
    rng = _rng(seed, 4242)
    dirs = _uniform_sphere(rng, n_dirs, N + 1)
    return np.concatenate([r * dirs for r in radii], axis=0)


def run_bmo_probe(config: ExperimentConfig, int_tol: float = 1e-3) -> Report:
    """Small-BMO probe: oscillation, extension distance, and invariant
    along a perturbation sweep."""
    entry = lookup(config.structure)
    structure = entry.structure
    if not entry.evaluable:
        raise ConfigError(f"structure {config.structure!r} is not "
                          f"numerically evaluable")
    N = structure.domain_dim
    mesh = build_sphere_mesh(N, config.levels[-1])
    probes = _probe_points(N, config.seed)
    rows = []
    for i, val in enumerate(config.sweep_values):
        spec = config.map_template.format(**{config.sweep_name: val})
        try:
            f = parse_map_spec(spec)
            est = bmo_seminorm(f, seed=config.seed + 1000 * i,
                               centers=48, cap_samples=96)
            dists = poisson_extension_distance(f, probes, mesh)
            dmax = max(d for _, d in dists)
            inv = hardt_riviere(f, structure, mesh).value
            ratio = dmax / est.value if est.value > 0 else 0.0
            rows.append(BmoRow(val, spec, est.value, est.error, dmax, inv,
                               ratio))
        except Exception as exc:
            rows.append(BmoRow(val, spec, np.nan, np.nan, np.nan, np.nan,
                               np.nan, error=str(exc)))
    block = BmoBlock(rows)
    good = [r for r in rows if not r.error]
    ratios = [r.ratio for r in good if r.ratio > 0]
    if ratios:
        block.ratio_stable = max(ratios) <= RATIO_SPREAD_LIMIT * min(ratios)
    else:
        block.ratio_stable = True
    block.invariants_integral = all(
        abs(r.invariant - round(r.invariant)) < int_tol for r in good)
    block.passed = (block.ratio_stable and block.invariants_integral
                    and len(good) == len(rows))
    return Report("bmo", config.echo(), [block], block.passed, _versions(),
                  _now())


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------

def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def emit_report(report: Report, fmt: str, path: str) -> str:
    """Serialize a report; JSON is lossless, CSV one row per sweep value."""
    if fmt == "json":
        with open(path, "w") as fh:
            json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    elif fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            first = True
            for block in report.blocks:
                rows = block.rows
                head = list(rows[0].as_dict()) if rows else []
                extra = (["beta"] if isinstance(block, ScalingBlock) else [])
                if first:
                    writer.writerow(extra + head)
                    first = False
                for r in rows:
                    pre = [str(block.beta)] if isinstance(block, ScalingBlock) else []
                    writer.writerow(pre + list(r.as_dict().values()))
            if first:
                writer.writerow(["parameter"])
    elif fmt == "text":
        with open(path, "w") as fh:
            fh.write(format_report_text(report))
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return path


def load_report(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def format_report_text(report: Report) -> str:
    buf = io.StringIO()
    buf.write(f"{report.kind} experiment: "
              f"{'PASS' if report.passed else 'FAIL'}\n")
    for block in report.blocks:
        if isinstance(block, ScalingBlock):
            buf.write(f"beta = {block.beta}  exponent = {block.exponent}  "
                      f"{'PASS' if block.passed else 'FAIL'}"
                      f"{'  [' + block.tag + ']' if block.tag else ''}\n")
            if block.slope is not None:
                buf.write(f"  fitted slope {block.slope:.4f} "
                          f"(stderr {block.slope_stderr:.4f})\n")
        for r in block.rows:
            d = r.as_dict()
            buf.write("  " + "  ".join(f"{k}={v}" for k, v in d.items()
                                       if v not in ("", None)) + "\n")
    return buf.getvalue()
