"""Rate experiments over n-grids of the example families, and their output."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__, bounds, chaos2, distances, gamma_ops
from .chaos2 import EigenvalueSpec
from .errors import ConfigError, DomainError
from .special_numerics import LogLogFit, fit_loglog

__all__ = [
    "ExperimentConfig",
    "RateSeries",
    "ExperimentReport",
    "METRICS",
    "MC_METRICS",
    "run",
    "emit",
    "render_csv",
    "render_json",
    "render_svg",
    "n_seed",
]

FORMATS = ("csv", "json", "svg")


@dataclass
class ExperimentConfig:
    family: str
    n_grid: list[int]
    nu: float | None = None
    metrics: list[str] = field(default_factory=lambda: ["delta0"])
    family_params: dict[str, float] = field(default_factory=dict)
    mc_samples: int = 100_000
    seed: int = 0
    b: float | None = None
    output_path: str | None = None
    formats: list[str] = field(default_factory=lambda: ["json"])
    workers: int | None = 1

    def __post_init__(self) -> None:
        if self.family not in chaos2.FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; choose from {sorted(chaos2.FAMILIES)}")
        if self.nu is None:
            self.nu = float(chaos2.family_nu(self.family))
        if not self.nu > 0:
            raise ConfigError("nu must be positive")
        self.n_grid = [int(n) for n in self.n_grid]
        if not self.n_grid:
            raise ConfigError("n_grid is empty")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError("n_grid must be strictly increasing")
        if self.n_grid[0] < 2:
            raise ConfigError("n_grid entries must be >= 2")
        if not self.metrics:
            raise ConfigError("no metrics selected")
        unknown = [m for m in self.metrics if m not in METRICS]
        if unknown:
            raise ConfigError(f"unknown metrics {unknown}; choose from {sorted(METRICS)}")
        if len(set(self.metrics)) != len(self.metrics):
            raise ConfigError("metrics contain duplicates")
        if "dtv" in self.metrics and self.family != "concrete":
            raise ConfigError("metric 'dtv' needs two positive eigenvalues: only the 'concrete' family has them")
        if any(m in MC_METRICS for m in self.metrics) and self.mc_samples < 1000:
            raise ConfigError("mc_samples must be >= 1000 when a Monte Carlo metric is selected")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad:
            raise ConfigError(f"unknown output formats {bad}")
        if self.b is not None and not self.b > bounds.B_MIN:
            raise ConfigError(f"b must exceed 1/(2 pi), got {self.b}")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        d = dict(d)
        fam = d.get("family")
        if isinstance(fam, dict):
            d["family"] = fam.get("name")
            d["family_params"] = {**fam.get("params", {}), **d.get("family_params", {})}
        out = d.pop("output", None)
        if isinstance(out, dict):
            d.setdefault("output_path", out.get("path"))
            d.setdefault("formats", out.get("formats", ["json"]))
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config fields {sorted(extra)}")
        if "family" not in d or "n_grid" not in d:
            raise ConfigError("config needs 'family' and 'n_grid'")
        try:
            return cls(**d)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path: str | os.PathLike) -> "ExperimentConfig":
        text = Path(path).read_text()
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def spec_for(self, n: int) -> EigenvalueSpec:
        try:
            return chaos2.family(self.family, n, **self.family_params)
        except DomainError as exc:
            raise ConfigError(f"n = {n}: {exc}") from exc


def n_seed(seed: int, n: int) -> int:
    """Seed of the Monte Carlo run at grid point n, independent across n."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(n)])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class _Ctx:
    cfg: ExperimentConfig
    n: int


Metric = Callable[[EigenvalueSpec, _Ctx], tuple[float, dict | None]]


def _delta(r: int) -> Metric:
    return lambda spec, ctx: (gamma_ops.delta(spec, r).value, None)


def _bound(fn: Callable) -> Metric:
    def metric(spec: EigenvalueSpec, ctx: _Ctx) -> tuple[float, dict | None]:
        rep = fn(spec, ctx.cfg.nu)
        return rep.value, rep.to_dict()

    return metric


def _kolmogorov(spec: EigenvalueSpec, ctx: _Ctx) -> tuple[float, dict | None]:
    rep = bounds.kolmogorov_bound(spec, ctx.cfg.nu, ctx.cfg.b)
    return rep.value, rep.to_dict()


def _gap(p: int) -> Metric:
    return lambda spec, ctx: (abs(chaos2.kappa_gap(spec, p, ctx.cfg.nu)), None)


def _nu_int(ctx: _Ctx) -> int:
    return max(1, int(round(ctx.cfg.nu)))


def _dtv(spec: EigenvalueSpec, ctx: _Ctx) -> tuple[float, dict | None]:
    if len(spec) != 2 or min(spec.coeffs) <= 0:
        raise ConfigError(f"n = {ctx.n}: dtv needs exactly two positive eigenvalues")
    est = distances.dtv_two_eig(*spec.coeffs)
    return est.value, asdict(est)


def _mc_kol(spec: EigenvalueSpec, ctx: _Ctx) -> tuple[float, dict | None]:
    est = distances.mc_kolmogorov(
        spec, ctx.cfg.nu, ctx.cfg.mc_samples, n_seed(ctx.cfg.seed, ctx.n), ctx.cfg.workers
    )
    return est.value, asdict(est)


def _ratio20(spec: EigenvalueSpec, ctx: _Ctx) -> tuple[float, dict | None]:
    d0 = gamma_ops.delta(spec, 0).value
    return (gamma_ops.delta(spec, 2).value / (d0 * d0) if d0 > 0 else math.nan), None


METRICS: dict[str, Metric] = {
    "delta0": _delta(0),
    "delta1": _delta(1),
    "delta2": _delta(2),
    "delta3": _delta(3),
    "delta2_over_delta0_sq": _ratio20,
    "M": lambda spec, ctx: (gamma_ops.discrepancy_M(spec, ctx.cfg.nu), None),
    "kappa3_gap": _gap(3),
    "kappa4_gap": _gap(4),
    "omega": lambda spec, ctx: (chaos2.omega_vartheta(spec, _nu_int(ctx))[0], None),
    "vartheta": lambda spec, ctx: (chaos2.omega_vartheta(spec, _nu_int(ctx))[1], None),
    "d1": _bound(bounds.d1_bound),
    "sqrt_cumulant": _bound(bounds.sqrt_cumulant_bound),
    "d2_bracket": _bound(bounds.d2_bracket),
    "d3_bracket": _bound(bounds.d3_bracket),
    "kolmogorov": _kolmogorov,
    "dtv": _dtv,
    "mc_kolmogorov": _mc_kol,
}
MC_METRICS = frozenset({"mc_kolmogorov"})


@dataclass(frozen=True)
class RateSeries:
    metric: str
    points: tuple[tuple[int, float], ...]
    fit: LogLogFit | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "metric": self.metric,
            "points": [[n, v] for n, v in self.points],
            "fit": None if self.fit is None else asdict(self.fit),
        }


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    series: tuple[RateSeries, ...]
    details: dict[str, dict[int, dict]]

    def series_for(self, metric: str) -> RateSeries:
        for s in self.series:
            if s.metric == metric:
                return s
        raise KeyError(metric)

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": __version__,
            "config": self.config.to_dict(),
            "series": [s.to_dict() for s in self.series],
            "details": {m: {str(n): d for n, d in v.items()} for m, v in self.details.items()},
        }


def _fit(points: list[tuple[int, float]]) -> LogLogFit | None:
    pos = [(n, v) for n, v in points if v > 0 and math.isfinite(v)]
    if len(pos) < 2:
        return None
    return fit_loglog(pos)


def run(cfg: ExperimentConfig) -> ExperimentReport:
    specs = {n: cfg.spec_for(n) for n in cfg.n_grid}
    # every metric compares against G(nu), which presumes E[F^2] = 2 nu
    for n, spec in specs.items():
        var = chaos2.variance(spec)
        if abs(var - 2.0 * cfg.nu) > bounds.VARIANCE_TOL * max(1.0, 2.0 * cfg.nu):
            raise ConfigError(
                f"n = {n}: family {cfg.family!r} has variance {var!r}, not 2*nu = {2.0 * cfg.nu!r}"
            )
    series = []
    details: dict[str, dict[int, dict]] = {}
    for name in cfg.metrics:
        metric = METRICS[name]
        pts = []
        for n in cfg.n_grid:
            value, extra = metric(specs[n], _Ctx(cfg, n))
            pts.append((n, float(value)))
            if extra is not None:
                details.setdefault(name, {})[n] = extra
        series.append(RateSeries(name, tuple(pts), _fit(pts)))
    return ExperimentReport(cfg, tuple(series), details)


def _g17(x: float) -> str:
    return format(x, ".17g")


def render_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "metric", "value"])
    for s in report.series:
        for n, v in s.points:
            w.writerow([n, s.metric, _g17(v)])
    return buf.getvalue()


def render_json(report: ExperimentReport) -> str:
    # float repr is the shortest string that round-trips exactly
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, allow_nan=True) + "\n"


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def render_svg(report: ExperimentReport, width: int = 720, height: int = 480) -> str:
    """Log-log chart, one polyline per metric plus its dashed fitted line."""
    pts = [(n, v) for s in report.series for n, v in s.points if v > 0 and math.isfinite(v)]
    left, right, top, bottom = 70, 170, 30, 50
    pw, ph = width - left - right, height - top - bottom
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>',
    ]
    if not pts:
        out.append(f'<text x="{left + 10}" y="{top + 20}">no positive values</text></svg>')
        return "\n".join(out) + "\n"
    lx = [math.log10(n) for n, _ in pts]
    ly = [math.log10(v) for _, v in pts]
    x0, x1 = math.floor(min(lx)), math.ceil(max(lx))
    y0, y1 = math.floor(min(ly)), math.ceil(max(ly))
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(u: float) -> float:
        return left + (u - x0) / (x1 - x0) * pw

    def py(u: float) -> float:
        return top + ph - (u - y0) / (y1 - y0) * ph

    for k in range(x0, x1 + 1):
        out.append(f'<line x1="{px(k):.2f}" y1="{top + ph}" x2="{px(k):.2f}" y2="{top + ph + 5}" stroke="#000"/>')
        out.append(f'<text x="{px(k):.2f}" y="{top + ph + 18}" text-anchor="middle">1e{k}</text>')
    for k in range(y0, y1 + 1):
        out.append(f'<line x1="{left - 5}" y1="{py(k):.2f}" x2="{left}" y2="{py(k):.2f}" stroke="#000"/>')
        out.append(f'<text x="{left - 8}" y="{py(k) + 4:.2f}" text-anchor="end">1e{k}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">n</text>')
    for i, s in enumerate(report.series):
        color = _PALETTE[i % len(_PALETTE)]
        good = [(n, v) for n, v in s.points if v > 0 and math.isfinite(v)]
        if good:
            poly = " ".join(f"{px(math.log10(n)):.2f},{py(math.log10(v)):.2f}" for n, v in good)
            out.append(f'<polyline points="{poly}" fill="none" stroke="{color}" stroke-width="2"/>')
        label = s.metric
        if s.fit is not None:
            a, b = math.log10(good[0][0]), math.log10(good[-1][0])
            ya = (s.fit.intercept + s.fit.slope * a * math.log(10)) / math.log(10)
            yb = (s.fit.intercept + s.fit.slope * b * math.log(10)) / math.log(10)
            out.append(
                f'<line x1="{px(a):.2f}" y1="{py(ya):.2f}" x2="{px(b):.2f}" y2="{py(yb):.2f}" '
                f'stroke="{color}" stroke-dasharray="5,4"/>'
            )
            label += f" (slope {s.fit.slope:.3f})"
        ly_ = top + 14 + 16 * i
        out.append(f'<text x="{left + pw + 10}" y="{ly_}" fill="{color}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


RENDERERS = {"csv": render_csv, "json": render_json, "svg": render_svg}


def emit(report: ExperimentReport, fmt: str, path: str | os.PathLike) -> None:
    if fmt not in RENDERERS:
        raise ConfigError(f"unknown format {fmt!r}")
    text = RENDERERS[fmt](report)
    p = Path(path)
    try:
        p.write_text(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {fmt} output to {p}: {exc.strerror}") from exc
