"""Command-line front end. Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 I/O failure."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Sequence

from . import __version__, bounds, chaos2, coeffs, distances, experiments, gamma_ops
from .chaos2 import EigenvalueSpec
from .errors import ConfigError, DomainError, NumericError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _parse_param(text: str) -> tuple[str, float]:
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key, float(val)


def _load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def _spec_from(args: argparse.Namespace, cfg: dict[str, Any]) -> tuple[EigenvalueSpec, float | None]:
    """Resolve (spec, default nu) from --spec, --family/--n or the config file."""
    raw = args.spec if args.spec is not None else cfg.get("spec")
    if raw is not None:
        vals = json.loads(raw) if isinstance(raw, str) else raw
        if not isinstance(vals, list):
            raise ConfigError("--spec must be a JSON array of reals")
        return chaos2.canonicalize(vals), None
    fam = args.family or cfg.get("family")
    if isinstance(fam, dict):
        cfg = {**cfg, "family_params": fam.get("params", {})}
        fam = fam.get("name")
    if fam is None:
        raise ConfigError("give --spec, --family with --n, or a config with 'spec' or 'family'")
    n = args.n if args.n is not None else cfg.get("n")
    if n is None:
        raise ConfigError("--family needs --n")
    params = dict(cfg.get("family_params", {}))
    params.update(dict(args.param or []))
    return chaos2.family(fam, n, **params), float(chaos2.family_nu(fam))


def _nu(args: argparse.Namespace, cfg: dict[str, Any], default: float | None, spec: EigenvalueSpec) -> float:
    nu = args.nu if args.nu is not None else cfg.get("nu", default)
    # fall back to the nu matched by the variance
    return float(nu) if nu is not None else chaos2.variance(spec) / 2.0


def _finite(x: Any) -> Any:
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


def _write(payload: dict[str, Any], args: argparse.Namespace) -> None:
    text = json.dumps(_finite(payload), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_cumulants(args, cfg) -> dict[str, Any]:
    spec, _ = _spec_from(args, cfg)
    p_max = args.p_max
    return {
        "spec": spec.to_json(),
        "variance": chaos2.variance(spec),
        "cumulants": {str(p): chaos2.cumulant(spec, p) for p in range(2, p_max + 1)},
    }


def cmd_delta(args, cfg) -> dict[str, Any]:
    spec, _ = _spec_from(args, cfg)
    rows = {}
    for r in range(args.r_max + 1):
        rows[str(r)] = {
            "eigenvalue_formula": gamma_ops.delta(spec, r).value,
            "cumulant_formula": gamma_ops.delta_via_cumulants(spec, r),
        }
    return {"spec": spec.to_json(), "delta": rows}


def cmd_bounds(args, cfg) -> dict[str, Any]:
    spec, default = _spec_from(args, cfg)
    nu = _nu(args, cfg, default, spec)
    b = args.b if args.b is not None else cfg.get("b")
    reps = [
        bounds.d1_bound(spec, nu),
        bounds.sqrt_cumulant_bound(spec, nu),
        bounds.d2_bracket(spec, nu),
        bounds.d3_bracket(spec, nu),
        bounds.kolmogorov_bound(spec, nu, b),
    ]
    return {"spec": spec.to_json(), "nu": nu, "bounds": [r.to_dict() for r in reps]}


def cmd_characterize(args, cfg) -> dict[str, Any]:
    spec, default = _spec_from(args, cfg)
    nu = _nu(args, cfg, default, spec)
    tol = args.tol if args.tol is not None else cfg.get("tol", 1e-10)
    verdict = gamma_ops.is_centered_gamma(spec, nu, tol)
    ratio = gamma_ops.ratio_condition(spec)
    mixed = gamma_ops.mixed_gamma_detect(spec, tol)
    lhs, rhs, holds = gamma_ops.trace_class_bound_check(spec)
    return {
        "spec": spec.to_json(),
        "nu": nu,
        "is_centered_gamma": asdict(verdict),
        "delta": {str(r): gamma_ops.delta(spec, r).value for r in range(4)},
        "phi_profile": asdict(gamma_ops.phi_profile(spec)),
        "trace_sign": gamma_ops.trace_sign(spec).value,
        "trace_class": {"lhs": lhs, "rhs": rhs, "holds": holds},
        "ratio_condition": "degenerate" if isinstance(ratio, gamma_ops.Degenerate) else ratio,
        "mixed_gamma": None if mixed is None else asdict(mixed),
        "M": gamma_ops.discrepancy_M(spec, nu),
    }


def cmd_dtv_example(args, cfg) -> dict[str, Any]:
    ns = args.n_list or cfg.get("n_grid") or [50, 100, 200, 400]
    rows = []
    for n in ns:
        c1, c2 = chaos2.family("concrete", int(n)).coeffs
        est = distances.dtv_two_eig(c1, c2)
        rows.append({"n": int(n), "dtv": est.value, "n2_dtv": n * n * est.value, "error_bound": est.error_bound})
    return {"family": "concrete", "rows": rows}


def cmd_kolmogorov(args, cfg) -> dict[str, Any]:
    spec, default = _spec_from(args, cfg)
    nu = _nu(args, cfg, default, spec)
    b = args.b if args.b is not None else cfg.get("b")
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    m = args.mc if args.mc is not None else cfg.get("mc_samples", 100_000)
    rep = bounds.kolmogorov_bound(spec, nu, b)
    out = {"spec": spec.to_json(), "nu": nu, "seed": seed, "bound": rep.to_dict()}
    if m:
        out["mc"] = asdict(distances.mc_kolmogorov(spec, nu, int(m), int(seed)))
    return out


def cmd_coeffs_verify(args, cfg) -> dict[str, Any]:
    ok, witness = coeffs.verify_equality(args.q, args.s_max)
    out: dict[str, Any] = {"q": args.q, "s_max": args.s_max, "equal": ok}
    if witness is not None:
        out["witness"] = {
            "rs": list(witness.rs),
            "c_new": coeffs.c_new(witness).value,
            "c_alt": coeffs.c_alt(witness).value,
        }
    return out


def cmd_rates(args, cfg) -> int:
    if not cfg:
        raise ConfigError("rates needs --config <json>")
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.format:
        cfg["formats"] = [args.format]
    conf = experiments.ExperimentConfig.from_dict(cfg)
    report = experiments.run(conf)
    target = args.out or conf.output_path
    if target is None:
        for fmt in conf.formats:
            sys.stdout.write(experiments.RENDERERS[fmt](report))
        return EXIT_OK
    path = Path(target)
    for fmt in conf.formats:
        dest = path if len(conf.formats) == 1 else path.with_suffix("." + fmt)
        experiments.emit(report, fmt, dest)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="64-bit seed for Monte Carlo steps")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=experiments.FORMATS, help="output format (rates)")

    spec_args = argparse.ArgumentParser(add_help=False)
    spec_args.add_argument("--spec", help="JSON array of eigenvalues, e.g. '[1.2, 0.9]'")
    spec_args.add_argument("--family", choices=sorted(chaos2.FAMILIES))
    spec_args.add_argument("--n", type=int)
    spec_args.add_argument("--param", type=_parse_param, action="append", help="family parameter key=value")
    spec_args.add_argument("--nu", type=float)

    p = argparse.ArgumentParser(prog="gammachaos", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("cumulants", parents=[common, spec_args])
    s.add_argument("--p-max", type=int, default=8)
    s = sub.add_parser("delta", parents=[common, spec_args])
    s.add_argument("--r-max", type=int, default=3)
    s = sub.add_parser("bounds", parents=[common, spec_args])
    s.add_argument("--b", type=float)
    s = sub.add_parser("characterize", parents=[common, spec_args])
    s.add_argument("--tol", type=float)
    s = sub.add_parser("dtv-example", parents=[common])
    s.add_argument("--n-list", type=int, nargs="+")
    s = sub.add_parser("kolmogorov", parents=[common, spec_args])
    s.add_argument("--b", type=float)
    s.add_argument("--mc", type=int, help="Monte Carlo sample size (0 disables)")
    sub.add_parser("rates", parents=[common])
    s = sub.add_parser("coeffs-verify", parents=[common])
    s.add_argument("--q", type=int, default=2)
    s.add_argument("--s-max", type=int, default=5)
    return p


_COMMANDS = {
    "cumulants": cmd_cumulants,
    "delta": cmd_delta,
    "bounds": cmd_bounds,
    "characterize": cmd_characterize,
    "dtv-example": cmd_dtv_example,
    "kolmogorov": cmd_kolmogorov,
    "coeffs-verify": cmd_coeffs_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if args.verb == "rates":
            return cmd_rates(args, cfg)
        _write(_COMMANDS[args.verb](args, cfg), args)
        return EXIT_OK
    except (ConfigError, DomainError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric failure: {exc} (estimate={exc.estimate}, error={exc.error})", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
