"""Command-line interface: config-driven sweeps with CSV/JSON output.

Config files are flat ``key = value`` lines (UTF-8, '#' comments). Sweep
axes are declared as repeatable blocks::

    sweep.param = grating2.length
    sweep.min = 0.05
    sweep.max = 0.1
    sweep.points = 10

Each new ``sweep.param`` line opens a new axis; axis order fixes the
row-major output order. ``--set key=value`` overrides scalar keys from the
command line. Rates are 1/m, lengths m, powers W; the dimensionless helper
keys kappa_L, xi_L and rho_L are divided by the section length at parse
time.

Exit codes: 0 success, 2 config error, 3 numerical/domain error,
4 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from .cavity import (CavitySpec, DeterminantNotReal, io_matrices,
                     threshold_determinant)
from .grating import GratingParams, PumpConfig, reflection_spectrum, xi_from_pumps
from .linalg import IllConditioned, SingularResolvent, metric_residual
from .oracle import _batch_transfer, convergence_order, transfer_to_scattering
from .qstats import field_profile, output_variances
from .threshold import NoFeedback, NoThresholdInRange, find_threshold

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def _coerce(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_config(text: str):
    """Return (scalars dict, sweep axis list) from config text."""
    scalars: dict = {}
    sweeps: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        parsed = _coerce(value)
        if key == "sweep.param":
            sweeps.append({"param": str(parsed)})
        elif key in ("sweep.min", "sweep.max", "sweep.points"):
            if not sweeps:
                raise ConfigError(f"line {lineno}: {key} before any sweep.param")
            field = key.split(".", 1)[1]
            if field in sweeps[-1]:
                raise ConfigError(f"line {lineno}: duplicate {key} in sweep block")
            sweeps[-1][field] = parsed
        else:
            if key in scalars:
                raise ConfigError(f"line {lineno}: duplicate key {key}")
            scalars[key] = parsed
    for blk in sweeps:
        for field in ("min", "max", "points"):
            if field not in blk:
                raise ConfigError(f"sweep over {blk['param']} missing sweep.{field}")
        if not isinstance(blk["points"], int) or blk["points"] < 1:
            raise ConfigError(f"sweep.points must be a positive integer")
        if not (math.isfinite(float(blk["min"])) and math.isfinite(float(blk["max"]))):
            raise ConfigError("sweep range must be finite")
        blk["values"] = np.linspace(float(blk["min"]), float(blk["max"]),
                                    int(blk["points"]))
    return scalars, sweeps


def _apply_overrides(scalars: dict, sets) -> dict:
    out = dict(scalars)
    for item in sets or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        key, value = key.strip(), value.strip()
        if key.startswith("sweep."):
            raise ConfigError("sweep axes cannot be overridden with --set")
        out[key] = _coerce(value)
    return out


def _check_keys(scalars: dict, allowed: set, command: str) -> None:
    unknown = sorted(set(scalars) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) for {command}: {', '.join(unknown)}")


def _fnum(cfg: dict, key: str, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key}")
        return float(default)
    value = cfg[key]
    if not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return float(value)


def _rate(cfg: dict, prefix: str, name: str, length: float, default=None) -> float:
    """Resolve e.g. grating.kappa vs grating.kappa_L (divided by length)."""
    plain, scaled = f"{prefix}.{name}", f"{prefix}.{name}_L"
    if plain in cfg and scaled in cfg:
        raise ConfigError(f"give only one of {plain} and {scaled}")
    if plain in cfg:
        return _fnum(cfg, plain)
    if scaled in cfg:
        return _fnum(cfg, scaled) / length
    if default is None:
        raise ConfigError(f"missing required key {plain} (or {scaled})")
    return float(default)


_GRATING_FIELDS = ("kappa", "kappa_L", "xi", "xi_L", "rho", "rho_L", "length")
_OUTPUT_KEYS = {"output.format", "output.path"}


def _grating_keys(prefix: str) -> set:
    return {f"{prefix}.{f}" for f in _GRATING_FIELDS}


def _build_grating(cfg: dict, prefix: str = "grating") -> GratingParams:
    length = _fnum(cfg, f"{prefix}.length")
    return GratingParams(
        kappa=_rate(cfg, prefix, "kappa", length),
        xi=_rate(cfg, prefix, "xi", length, default=0.0),
        rho=_rate(cfg, prefix, "rho", length, default=0.0),
        length=length)


_CAVITY_KEYS = (
    (_grating_keys("grating1") | _grating_keys("grating2"))
    - {"grating1.xi", "grating1.xi_L", "grating2.xi", "grating2.xi_L"}
) | {"mid_length", "theta", "theta_pi", "theta_from_beta",
     "pumps.p1", "pumps.p2", "pumps.gamma_nl"}


def _build_cavity(cfg: dict) -> CavitySpec:
    g1 = _cavity_grating(cfg, "grating1")
    g2 = _cavity_grating(cfg, "grating2")
    mid = _fnum(cfg, "mid_length", default=0.0)
    theta_keys = [k for k in ("theta", "theta_pi", "theta_from_beta") if k in cfg]
    if len(theta_keys) > 1:
        raise ConfigError(f"give only one of {', '.join(theta_keys)}")
    if "theta_pi" in cfg:
        theta = _fnum(cfg, "theta_pi") * math.pi
    elif "theta_from_beta" in cfg:
        theta = (_fnum(cfg, "theta_from_beta") + g1.rho) * mid
    else:
        theta = _fnum(cfg, "theta", default=0.0)
    pumps = PumpConfig(p1=_fnum(cfg, "pumps.p1", default=0.0),
                       p2=_fnum(cfg, "pumps.p2", default=0.0),
                       gamma_nl=_fnum(cfg, "pumps.gamma_nl"))
    return CavitySpec(grating1=g1, grating2=g2, mid_length=mid,
                      theta=theta, pumps=pumps)


def _cavity_grating(cfg: dict, prefix: str) -> GratingParams:
    length = _fnum(cfg, f"{prefix}.length")
    return GratingParams(
        kappa=_rate(cfg, prefix, "kappa", length),
        xi=0.0,  # overwritten by the pump configuration
        rho=_rate(cfg, prefix, "rho", length, default=0.0),
        length=length)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    return f"{float(value):.17g}"


def _write_rows(cfg: dict, header: list, rows: list) -> None:
    fmt = str(cfg.get("output.format", "csv")).lower()
    path = cfg.get("output.path")
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        payload = "\n".join(lines) + "\n"
    elif fmt == "json":
        def jsonable(v):
            if isinstance(v, str):
                return v
            v = float(v)
            return None if math.isnan(v) else v
        records = [{k: jsonable(v) for k, v in zip(header, row)} for row in rows]
        payload = json.dumps(records, indent=2) + "\n"
    else:
        raise ConfigError(f"output.format must be csv or json, got {fmt!r}")
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_grating_spectrum(cfg: dict, sweeps: list) -> int:
    _check_keys(cfg, _grating_keys("grating") | _OUTPUT_KEYS, "grating-spectrum")
    if len(sweeps) != 1 or sweeps[0]["param"] not in (
            "grating.rho", "grating.rho_L", "rho", "rho_L"):
        raise ConfigError("grating-spectrum needs exactly one sweep over "
                          "grating.rho or grating.rho_L")
    if "grating.rho" in cfg or "grating.rho_L" in cfg:
        raise ConfigError("grating.rho is supplied by the sweep axis")
    g = _build_grating(cfg)
    values = sweeps[0]["values"]
    if sweeps[0]["param"].endswith("rho_L"):
        values = values / g.length
    points = reflection_spectrum(g, values)
    rows = [(pt.rho, pt.transmission, pt.reflection, pt.photon_gain,
             "ok" if pt.ok else "degenerate") for pt in points]
    _write_rows(cfg, ["rho", "transmission", "reflection", "photon_gain", "status"],
                rows)
    return EXIT_OK


_GEOMETRY_AXES = {"grating1.length", "grating1.kappa", "grating2.length",
                  "grating2.kappa", "mid_length", "theta"}


def _with_axis(cfg: dict, param: str, value: float) -> dict:
    out = dict(cfg)
    out[param] = float(value)
    return out


def cmd_cavity_squeeze(cfg: dict, sweeps: list) -> int:
    _check_keys(cfg, _CAVITY_KEYS | _OUTPUT_KEYS, "cavity-squeeze")
    if not sweeps or len(sweeps) > 2:
        raise ConfigError("cavity-squeeze needs one pump sweep plus at most "
                          "one geometry sweep")
    pump_axis = sweeps[-1]
    if pump_axis["param"] not in ("pump_fraction", "pump_product"):
        raise ConfigError("the last sweep axis must be pump_fraction or pump_product")
    geo_axis = sweeps[0] if len(sweeps) == 2 else None
    if geo_axis is not None and geo_axis["param"] not in _GEOMETRY_AXES:
        raise ConfigError(f"geometry axis must be one of {sorted(_GEOMETRY_AXES)}")

    header = ["pump_product", "squeezing_db_b", "antisqueezing_db_b",
              "squeezing_db_g", "n_b", "n_g", "status"]
    if geo_axis is not None:
        header.insert(0, geo_axis["param"])
    rows = []
    geo_values = geo_axis["values"] if geo_axis is not None else [None]
    for geo in geo_values:
        local = _with_axis(cfg, geo_axis["param"], geo) if geo_axis is not None else cfg
        spec = _build_cavity(local)
        gamma = spec.pumps.gamma_nl
        if gamma <= 0:
            raise ConfigError("pumps.gamma_nl must be positive for pump sweeps")
        xi_th = None
        if pump_axis["param"] == "pump_fraction":
            xi_th = find_threshold(spec).xi_th
        for val in pump_axis["values"]:
            if pump_axis["param"] == "pump_fraction":
                xi = math.sqrt(max(val, 0.0)) * xi_th
                product = max(val, 0.0) * (xi_th / (2 * gamma)) ** 2
            else:
                product = max(float(val), 0.0)
                xi = 2.0 * gamma * math.sqrt(product)
            prefix = [float(geo)] if geo_axis is not None else []
            try:
                io = io_matrices(spec, xi_override=xi)
                stats_b = output_variances(spec, "b", io=io)
                stats_g = output_variances(spec, "g", io=io)
            except SingularResolvent:
                rows.append(prefix + [product] + [math.nan] * 5
                            + ["above_threshold"])
                continue
            rows.append(prefix + [product, stats_b.squeezing_db,
                                  stats_b.antisqueezing_db, stats_g.squeezing_db,
                                  stats_b.mean_photons, stats_g.mean_photons, "ok"])
    _write_rows(cfg, header, rows)
    return EXIT_OK


def cmd_threshold(cfg: dict, sweeps: list) -> int:
    _check_keys(cfg, _CAVITY_KEYS | _OUTPUT_KEYS, "threshold")
    allowed_axes = {"grating2.length", "mid_length"}
    if len(sweeps) > 2:
        raise ConfigError("threshold supports at most two sweep axes")
    for blk in sweeps:
        if blk["param"] not in allowed_axes:
            raise ConfigError(f"threshold axes must be within {sorted(allowed_axes)}")
    axis_values = [blk["values"] for blk in sweeps] or [[None]]
    grids = np.meshgrid(*axis_values, indexing="ij") if sweeps else None

    rows = []
    combos = [()] if not sweeps else list(
        zip(*(g.ravel() for g in grids)))
    for combo in combos:
        local = dict(cfg)
        for blk, value in zip(sweeps, combo):
            local[blk["param"]] = float(value)
        spec = _build_cavity(local)
        try:
            result = find_threshold(spec)
            rows.append([spec.grating2.length, spec.mid_length,
                         result.pump_product, "ok"])
        except (NoThresholdInRange, NoFeedback):
            rows.append([spec.grating2.length, spec.mid_length,
                         math.nan, "no_threshold"])
    _write_rows(cfg, ["L2", "L3", "pump_product_threshold", "status"], rows)
    return EXIT_OK


def cmd_profile(cfg: dict, sweeps: list) -> int:
    allowed = _CAVITY_KEYS | _OUTPUT_KEYS | {"pump_fraction", "samples_per_section"}
    _check_keys(cfg, allowed, "profile")
    if sweeps:
        raise ConfigError("profile takes no sweep axes")
    spec = _build_cavity(cfg)
    if "pump_fraction" in cfg:
        frac = _fnum(cfg, "pump_fraction")
        if frac < 0:
            raise ConfigError("pump_fraction must be >= 0")
        xi = math.sqrt(frac) * find_threshold(spec).xi_th
    else:
        xi = xi_from_pumps(spec.pumps)
    if xi > 0 and threshold_determinant(spec, xi) <= 0:
        raise SingularResolvent("requested pump is at or above threshold")
    samples = cfg.get("samples_per_section", 200)
    if not isinstance(samples, int) or samples < 2:
        raise ConfigError("samples_per_section must be an integer >= 2")
    profile = field_profile(spec, samples_per_section=samples, xi_override=xi)
    rows = list(zip(profile.z_grid, profile.n_forward, profile.n_backward))
    _write_rows(cfg, ["z", "n_forward", "n_backward"], rows)
    return EXIT_OK


_VERIFY_BOX = {"kappa_L": (0.0, 5.0), "xi_L": (0.0, 2.0), "rho_L": (-10.0, 10.0)}
_VERIFY_TOL = {"scattering": 1e-6, "symplectic": 1e-8,
               "order_low": 3.5, "order_high": 4.5}


def cmd_verify(cfg: dict, sweeps: list) -> int:
    _check_keys(cfg, {"oracle.steps", "verify.samples", "verify.seed"}
                | _OUTPUT_KEYS, "verify")
    if sweeps:
        raise ConfigError("verify takes no sweep axes")
    steps = cfg.get("oracle.steps", 100_000)
    samples = cfg.get("verify.samples", 20)
    seed = cfg.get("verify.seed", 7)
    if not isinstance(steps, int) or steps < 1000:
        raise ConfigError("oracle.steps must be an integer >= 1000")
    if not isinstance(samples, int) or samples < 1:
        raise ConfigError("verify.samples must be a positive integer")

    from .grating import _general_solution, endpoint_scattering

    rng = np.random.default_rng(seed)
    length = 0.05
    gratings = [
        GratingParams(kappa=3.0 / length, xi=0.0, rho=0.0, length=length),
        GratingParams(kappa=2.0 / length, xi=0.0, rho=4.0 / length, length=length),
        GratingParams(kappa=3.0 / length, xi=1.0 / length, rho=9.0 / length,
                      length=length),
    ]
    for _ in range(samples):
        kl = rng.uniform(*_VERIFY_BOX["kappa_L"])
        xl = rng.uniform(*_VERIFY_BOX["xi_L"])
        rl = rng.uniform(*_VERIFY_BOX["rho_L"])
        gratings.append(GratingParams(kappa=kl / length, xi=xl / length,
                                      rho=rl / length, length=length))

    transfers = _batch_transfer(gratings, steps)
    max_dev = 0.0
    max_residual = 0.0
    per_sample = []
    for g, t in zip(gratings, transfers):
        oracle_ep = transfer_to_scattering(t)
        analytic_ep = endpoint_scattering(g, _general_solution(g))
        dev = max(abs(getattr(oracle_ep, f) - getattr(analytic_ep, f))
                  for f in ("u", "v", "p", "q", "u_bar", "v_bar", "p_bar", "q_bar"))
        residual = metric_residual(analytic_ep.as_matrix())
        max_dev = max(max_dev, dev)
        max_residual = max(max_residual, residual)
        per_sample.append({
            "kappa_L": float(g.kappa * g.length), "xi_L": float(g.xi * g.length),
            "rho_L": float(g.rho * g.length),
            "deviation": float(dev), "symplectic_residual": float(residual)})

    order = convergence_order(GratingParams(
        kappa=2.0 / length, xi=0.3 / length, rho=1.0 / length, length=length))
    passed = (max_dev < _VERIFY_TOL["scattering"]
              and max_residual < _VERIFY_TOL["symplectic"]
              and _VERIFY_TOL["order_low"] <= order <= _VERIFY_TOL["order_high"])
    report = {
        "oracle_steps": steps,
        "samples": len(gratings),
        "max_scattering_deviation": float(max_dev),
        "max_symplectic_residual": float(max_residual),
        "convergence_order": order,
        "tolerances": dict(_VERIFY_TOL),
        "passed": passed,
        "per_sample": per_sample,
    }
    payload = json.dumps(report, indent=2) + "\n"
    path = cfg.get("output.path")
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
        print(f"verify: {'pass' if passed else 'FAIL'} "
              f"(max deviation {max_dev:.3e}, order {order:.2f})")
    else:
        sys.stdout.write(payload)
    return EXIT_OK if passed else EXIT_VERIFY


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "grating-spectrum": cmd_grating_spectrum,
    "cavity-squeeze": cmd_cavity_squeeze,
    "threshold": cmd_threshold,
    "profile": cmd_profile,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dfbopo",
        description="Distributed-feedback parametric oscillator model: "
                    "spectra, squeezing, thresholds, field profiles.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
            ("grating-spectrum", "single-grating response over a detuning grid"),
            ("cavity-squeeze", "output squeezing and photon numbers over a pump sweep"),
            ("threshold", "oscillation threshold pump product over geometry grids"),
            ("profile", "intracavity photon-number profile along the device"),
            ("verify", "cross-check the analytic solver against the ODE integrator")]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="path to the config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a scalar config key")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        scalars, sweeps = parse_config(text)
        scalars = _apply_overrides(scalars, args.set)
        return _COMMANDS[args.command](scalars, sweeps)
    except (ConfigError, ValueError) as exc:
        if isinstance(exc, (SingularResolvent, IllConditioned, NoThresholdInRange,
                            NoFeedback, DeterminantNotReal)):
            print(f"numerical error: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
