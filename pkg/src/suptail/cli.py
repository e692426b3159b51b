"""Command-line front end: constants, bound curves, covering checks, simulate-verify.

One JSON config per run; unknown keys are rejected before any computation.
Outputs are byte-stable for a fixed config and seed, carry the config hash,
and use LF line endings with '.' decimals in CSV.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import growth, heat, sim, supbound
from .curves import TailCurve
from .entropy import HolderProfile
from .metric import AnisotropicBox, covering_oracle, covering_upper_bound
from .orlicz import PhiFamily


class ConfigError(ValueError):
    """Config file violates the schema."""


# --------------------------------------------------------------------------
# Config handling
# --------------------------------------------------------------------------

_MODEL_KEYS = {"hurst", "rho", "holder_const", "init_sup", "det_const", "alpha"}
_BOX_KEYS = {"a1", "b1", "a2", "b2", "h1", "h2"}
_PROFILE_KEYS = {"scale", "exponent"}
_UGRID_KEYS = {"min", "max", "count", "scale"}
_MEASURE_KEYS = {"sigma2", "alpha_m"}

_SCHEMAS = {
    "constants": {"model"},
    "bound-sup": {"field", "model", "box", "u_grid", "u_auto", "theta", "fam", "eps0", "profile"},
    "bound-growth": {"model", "p", "halfwidth", "u_grid", "series_tol"},
    "covering": {"box", "eps", "resolution"},
    "simulate-verify": {
        "field",
        "model",
        "box",
        "grid",
        "samples",
        "u_grid",
        "u_auto",
        "theta",
        "workers",
        "measure",
        "mu",
    },
}


def _require_keys(block: dict, allowed: set, where: str, required: set = frozenset()) -> None:
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {where}; allowed: {sorted(allowed)}")
    missing = required - set(block)
    if missing:
        raise ConfigError(f"missing keys {sorted(missing)} in {where}")


def load_config(path: str, command: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    _require_keys(cfg, _SCHEMAS[command], f"config for {command}")
    if "model" in cfg:
        _require_keys(cfg["model"], _MODEL_KEYS, "model", required={"hurst"})
    if "box" in cfg:
        _require_keys(cfg["box"], _BOX_KEYS, "box", required={"a1", "b1", "a2", "b2"})
    if "profile" in cfg:
        _require_keys(cfg["profile"], _PROFILE_KEYS, "profile", required=_PROFILE_KEYS)
    if "measure" in cfg:
        _require_keys(cfg["measure"], _MEASURE_KEYS, "measure", required=_MEASURE_KEYS)
    if isinstance(cfg.get("u_auto"), dict):
        _require_keys(cfg["u_auto"], _UGRID_KEYS, "u_auto")
    return cfg


def config_hash(cfg: dict) -> str:
    """Hash of the semantic config; execution-only keys (worker count) are
    excluded so runs that must produce identical bytes share a hash."""
    semantic = {k: v for k, v in cfg.items() if k != "workers"}
    canonical = json.dumps(semantic, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _model_from(cfg: dict) -> heat.SheModel:
    return heat.SheModel(**cfg["model"])


def _box_from(cfg: dict) -> AnisotropicBox:
    return AnisotropicBox(**cfg["box"])


def _u_grid(cfg: dict, inputs: supbound.FieldBoundInputs | None) -> list[float]:
    if "u_grid" in cfg and cfg["u_grid"] is not None:
        us = [float(u) for u in cfg["u_grid"]]
        if any(b <= a for a, b in zip(us, us[1:])):
            raise ConfigError("u_grid must be strictly increasing")
        return us
    auto = cfg.get("u_auto") or {}
    count = int(auto.get("count", 12))
    span = float(auto.get("max", 2.0))  # multiple of the minimal threshold
    if inputs is None:
        raise ConfigError("u_auto requires a bound context; give u_grid explicitly")
    # minimal validity threshold over theta, found on the same concave scale
    # the optimizer uses; pad the low end so a couple of entries are invalid.
    cap = inputs.theta_cap * (1.0 - 1e-9)
    thetas = np.geomspace(1e-6, cap, 256)
    thr = min(u_threshold_safe(float(t), inputs) for t in thetas)
    lo = 0.9 * thr
    hi = span * thr
    return [float(u) for u in np.linspace(lo, hi, count)]


def u_threshold_safe(theta: float, inputs: supbound.FieldBoundInputs) -> float:
    try:
        return supbound.u_threshold(theta, inputs)
    except ValueError:
        return math.inf


# --------------------------------------------------------------------------
# Output helpers
# --------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(path: Path, header: list[str], rows: list[tuple], meta: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# config_hash={meta['config_hash']} seed={meta['seed']}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _meta(cfg: dict, seed) -> dict:
    return {"config_hash": config_hash(cfg), "seed": seed}


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_constants(cfg: dict, out: Path, seed, fmt: str, tol: float | None) -> int:
    model_cfg = dict(cfg["model"])
    if tol is not None:
        model_cfg["quad_tol"] = tol
    model = heat.SheModel(**model_cfg)
    meta = _meta(cfg, seed)
    payload = {
        "constants": model.constants(),
        "provenance": {
            "quad_tol": model.quad_tol,
            "notes": [
                "variance_coefficient is the exact spectral time-integral "
                "Gamma(1-H) 2^(H-1) / H, so the variance identity holds",
                "tail bounds use the subtracted entropy term in the exponent "
                "argument and are clamped to [0, 1]",
                "rational spectral moments use the beta-function value",
            ],
        },
        **meta,
    }
    if fmt == "csv":
        rows = [(k, v) for k, v in sorted(model.constants().items())]
        write_csv(out / "constants.csv", ["name", "value"], rows, meta)
    else:
        write_json(out / "constants.json", payload)
    return 0


def _bound_inputs(cfg: dict) -> supbound.FieldBoundInputs:
    kind = cfg.get("field", "v")
    if kind == "generic":
        box = _box_from(cfg)
        prof_cfg = cfg.get("profile")
        if prof_cfg is None or "eps0" not in cfg or "fam" not in cfg:
            raise ConfigError("generic bounds need 'fam', 'eps0' and 'profile'")
        return supbound.FieldBoundInputs(
            eps0=float(cfg["eps0"]),
            box=box,
            prof=HolderProfile.power(float(prof_cfg["scale"]), float(prof_cfg["exponent"])),
            fam=PhiFamily(float(cfg["fam"])),
        )
    model = _model_from(cfg)
    box = _box_from(cfg)
    if kind == "v":
        return heat.v_bound_inputs(box, model)
    if kind == "omega":
        return heat.omega_bound_inputs(box, model)
    raise ConfigError(f"unknown field kind {kind!r}")


def _bound_curve(us: list[float], theta_cfg, inputs) -> list[tuple]:
    rows = []
    for u in us:
        if theta_cfg in (None, "optimize"):
            try:
                theta, bound = supbound.optimize_theta(u, inputs)
                rows.append((u, theta, bound, "VALID"))
            except ValueError:
                rows.append((u, math.nan, math.nan, "INVALID"))
        else:
            theta = float(theta_cfg)
            try:
                bound = supbound.sup_tail_bound(u, theta, inputs)
                rows.append((u, theta, bound, "VALID"))
            except ValueError:
                rows.append((u, theta, math.nan, "INVALID"))
    return rows


def cmd_bound_sup(cfg: dict, out: Path, seed, fmt: str, tol: float | None) -> int:
    inputs = _bound_inputs(cfg)
    us = _u_grid(cfg, inputs)
    rows = _bound_curve(us, cfg.get("theta"), inputs)
    meta = _meta(cfg, seed)
    header = ["u", "theta", "bound", "validity"]
    if fmt == "csv":
        write_csv(out / "bound_sup.csv", header, rows, meta)
    else:
        write_json(
            out / "bound_sup.json",
            {"curve": [dict(zip(header, row)) for row in rows], **meta},
        )
    return 0


def cmd_bound_growth(cfg: dict, out: Path, seed, fmt: str, tol: float | None) -> int:
    model = _model_from(cfg)
    p = float(cfg.get("p", 2.0))
    halfwidth = float(cfg.get("halfwidth", 1.0))
    series_tol = float(cfg.get("series_tol", 1e-6))
    if "u_grid" not in cfg:
        raise ConfigError("bound-growth requires an explicit u_grid")
    us = [float(u) for u in cfg["u_grid"]]
    result = heat.she_growth_envelope(
        model, p, us, halfwidth=halfwidth, series_tol=series_tol
    )
    spec = heat.growth_spec_for_v(model, p, halfwidth)
    rows = []
    for u, env in zip(result.curve.u, result.curve.value):
        try:
            theta, opt = growth.optimize_theta_growth(
                u, spec, result.c_tilde.value, result.s_tilde.value
            )
        except ValueError:
            theta, opt = math.nan, math.nan
        rows.append((u, env, opt, theta, "VALID" if not math.isnan(env) else "INVALID"))
    meta = _meta(cfg, seed)
    payload = {
        "series": {
            "c_tilde": result.c_tilde.value,
            "c_tilde_remainder": result.c_tilde.remainder,
            "c_tilde_terms": result.c_tilde.n_terms,
            "s_tilde": result.s_tilde.value,
            "s_tilde_remainder": result.s_tilde.remainder,
            "s_tilde_terms": result.s_tilde.n_terms,
            "theta_cap": result.theta_cap,
        },
        "curve": [
            dict(zip(["u", "envelope_bound", "optimized_bound", "theta_star", "validity"], r))
            for r in rows
        ],
        **meta,
    }
    header = ["u", "envelope_bound", "optimized_bound", "theta_star", "validity"]
    if fmt == "csv":
        write_csv(out / "bound_growth.csv", header, rows, meta)
        write_json(out / "bound_growth_series.json", {"series": payload["series"], **meta})
    else:
        write_json(out / "bound_growth.json", payload)
    return 0


def cmd_covering(cfg: dict, out: Path, seed, fmt: str, tol: float | None) -> int:
    box = _box_from(cfg)
    eps = float(cfg["eps"])
    resolution = int(cfg.get("resolution", 101))
    bound = covering_upper_bound(box, eps)
    oracle = covering_oracle(box, eps, resolution)
    meta = _meta(cfg, seed)
    write_json(
        out / "covering.json",
        {
            "eps": eps,
            "resolution": resolution,
            "upper_bound": bound,
            "oracle_count": oracle,
            "oracle_leq_bound": oracle <= bound,
            **meta,
        },
    )
    return 0 if oracle <= bound else 1


def cmd_simulate_verify(cfg: dict, out: Path, seed, fmt: str, tol: float | None) -> int:
    if seed is None:
        raise ConfigError("simulate-verify requires an explicit --seed")
    model = _model_from(cfg)
    box = _box_from(cfg)
    grid_cfg = cfg.get("grid", {})
    nt = int(grid_cfg.get("nt", 24))
    nx = int(grid_cfg.get("nx", 24))
    n_samples = int(cfg.get("samples", 0))
    if n_samples <= 0:
        raise ConfigError("simulate-verify requires a positive 'samples'")
    workers = int(cfg.get("workers", 1))

    kind = cfg.get("field", "v")
    if kind != "v":
        raise ConfigError("simulate-verify currently drives the 'v' field")
    inputs = heat.v_bound_inputs(box, model)
    us = _u_grid(cfg, inputs)

    field_model = sim.GaussianFieldModel(
        kind="v",
        grid=sim.make_grid(box, nt, nx),
        hurst=model.hurst,
        box=box,
        quad_tol=tol if tol is not None else 1e-10,
    )
    fields = sim.sample_fields(field_model, n_samples, seed=seed, workers=workers)
    empirical = sim.empirical_sup_tail(fields, us)

    bounds = []
    for u in us:
        try:
            _, b = supbound.optimize_theta(u, inputs)
        except ValueError:
            b = math.nan
        bounds.append(b)
    theoretical = TailCurve(u=tuple(us), value=tuple(bounds))
    report = sim.verify_bound(empirical, theoretical)

    meta = _meta(cfg, seed)
    rows = list(
        zip(report.u, report.empirical, report.ci_lo, report.ci_hi, report.bound, report.verdict)
    )
    write_csv(
        out / "verify_curve.csv",
        ["u", "empirical", "ci_lo", "ci_hi", "bound", "verdict"],
        rows,
        meta,
    )
    write_json(
        out / "verify_report.json",
        {
            "passed": report.passed,
            "n_fail": report.n_fail,
            "n_samples": report.n_samples,
            "note": report.note,
            "rows": [
                dict(zip(["u", "empirical", "ci_lo", "ci_hi", "bound", "verdict"], r))
                for r in rows
            ],
            **meta,
        },
    )
    return 0 if report.passed else 2


_COMMANDS = {
    "constants": cmd_constants,
    "bound-sup": cmd_bound_sup,
    "bound-growth": cmd_bound_growth,
    "covering": cmd_covering,
    "simulate-verify": cmd_simulate_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="suptail",
        description="Supremum tail bounds for sub-Gaussian-type random fields, "
        "with Monte Carlo verification for the heat-equation fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (required for verify)")
        p.add_argument("--tol", type=float, default=None, help="quadrature tolerance override")
        p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.command)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, out, args.seed, args.format, args.tol)
    except (ConfigError, ValueError, RuntimeError, OSError, json.JSONDecodeError) as exc:
        print(f"suptail {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
