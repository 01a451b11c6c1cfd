"""Command-line front end: ``bihardy {check,classify,witness,reduce-verify,calibrate}``.

Configuration is a TOML file; flags override it.  Exit codes:
0 holds, 2 fails, 3 not covered, 4 unknown, 1 configuration or diagnostic error.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .classify import (FAILS, HOLDS, HOLDS_SUFFICIENT, NOT_COVERED, UNKNOWN, PowerDatum,
                       classify)
from .asymptotics import Growth
from .conditions import ConditionReport, eval_report
from .exponents import ExponentDomainError, ExponentSystem
from .geometry import GeometryDomainError, GeometryKind, RadialGeometry
from .quad import QuadConfig, UndeterminedError
from .reduction import (PowerTrunc, lhs_line, lhs_space, lift, project, rhs_line, rhs_space)
from .weights import Constant, Custom, Power, PositiveFunction, SinhPower, WeightTriple, \
    build_line_weights
from .witness import (WitnessSearchConfig, classic_hardy_calibration, classic_hardy_closed_form,
                      search_best_ratio, sharp_constant)

EXIT_OK, EXIT_ERROR, EXIT_FAILS, EXIT_NOT_COVERED, EXIT_UNKNOWN = 0, 1, 2, 3, 4

VERDICT_EXIT = {HOLDS: EXIT_OK, HOLDS_SUFFICIENT: EXIT_OK, FAILS: EXIT_FAILS,
                NOT_COVERED: EXIT_NOT_COVERED, UNKNOWN: EXIT_UNKNOWN}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


# --------------------------------------------------------------------------
# custom weight registry: name -> (log evaluator factory, hints factory)


def _shifted_power(exponent: float, scale: float) -> Custom:
    return Custom(lambda t: exponent * np.log1p(scale * t), (0.0, exponent),
                  f"shifted_power({exponent:g},{scale:g})", is_log=True)


def _power_exp(exponent: float, scale: float) -> Custom:
    return Custom(lambda t: exponent * np.log(t) - scale * t,
                  (exponent, Growth(-scale, exponent)), f"power_exp({exponent:g},{scale:g})",
                  is_log=True)


CUSTOM_REGISTRY = {
    "shifted_power": _shifted_power,  # (1 + scale t)^exponent
    "power_exp": _power_exp,  # t^exponent e^(-scale t)
}

DEFAULT_CONFIG = {
    "geometry": {"kind": "Homogeneous", "dim": 4.0, "sphere_area": 1.0},
    "exponents": {"p1": 2.0, "p2": 2.0, "q": 2.0},
    "weights": {
        "u": {"form": "power", "exponent": -6.0},
        "v1": {"form": "power", "exponent": 3.0},
        "v2": {"form": "power", "exponent": 3.0},
    },
    "quadrature": {"rel_tol": 1e-9, "abs_tol": 1e-12},
    "witness": {"budget": 2000, "restarts": 8, "seed": 0},
    "calibrate": {"p": 2.0, "eps": 0.0, "deltas": [0.1, 0.03, 0.01]},
}

_SCHEMA = {
    "geometry": {"kind": str, "dim": float, "sphere_area": float, "b": float},
    "exponents": {"p1": float, "p2": float, "q": float},
    "weights": {"u": dict, "v1": dict, "v2": dict},
    "quadrature": {"rel_tol": float, "abs_tol": float},
    "witness": {"budget": int, "restarts": int, "seed": int},
    "calibrate": {"p": float, "eps": float, "deltas": list},
}
_WEIGHT_SCHEMA = {"form": str, "exponent": float, "scale": float, "name": str, "value": float}
_FORMS = ("power", "sinh_power", "constant", "custom")


def _check_type(path: str, value, kind):
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if not isinstance(value, kind):
        raise ConfigError(f"{path}: expected {kind.__name__}, got {value!r}")
    return value


def validate_config(raw: dict) -> dict:
    """Merge ``raw`` over the defaults, rejecting unknown keys and wrong types."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    for section, body in raw.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        if section == "geometry" and "kind" in body and body.get("kind") != cfg[section]["kind"]:
            cfg[section] = {}
        for key, value in body.items():
            path = f"{section}.{key}"
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {path}")
            value = _check_type(path, value, _SCHEMA[section][key])
            if section == "weights":
                for wk, wv in value.items():
                    if wk not in _WEIGHT_SCHEMA:
                        raise ConfigError(f"unknown key {path}.{wk}")
                    _check_type(f"{path}.{wk}", wv, _WEIGHT_SCHEMA[wk])
                form = value.get("form")
                if form not in _FORMS:
                    raise ConfigError(f"{path}.form must be one of {', '.join(_FORMS)}")
                if form == "custom" and value.get("name") not in CUSTOM_REGISTRY:
                    raise ConfigError(f"{path}.name must name a registered custom weight: "
                                      f"{', '.join(sorted(CUSTOM_REGISTRY))}")
                value = {k: (float(v) if _WEIGHT_SCHEMA[k] is float else v)
                         for k, v in value.items()}
            if section == "calibrate" and key == "deltas":
                value = [_check_type(f"{path}[{i}]", d, float) for i, d in enumerate(value)]
            cfg[section][key] = value
    return cfg


def load_config(path: str | None) -> dict:
    if path is None:
        return validate_config({})
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return validate_config(raw)


def apply_overrides(cfg: dict, args) -> dict:
    cfg = copy.deepcopy(cfg)
    if getattr(args, "rel_tol", None) is not None:
        cfg["quadrature"]["rel_tol"] = args.rel_tol
    if getattr(args, "abs_tol", None) is not None:
        cfg["quadrature"]["abs_tol"] = args.abs_tol
    if getattr(args, "seed", None) is not None:
        cfg["witness"]["seed"] = args.seed
    if getattr(args, "budget", None) is not None:
        cfg["witness"]["budget"] = args.budget
    return cfg


# --------------------------------------------------------------------------
# builders


def build_geometry(cfg: dict) -> RadialGeometry:
    g = cfg["geometry"]
    try:
        kind = GeometryKind(g.get("kind"))
    except ValueError:
        raise ConfigError("geometry.kind must be one of "
                          + ", ".join(k.value for k in GeometryKind)) from None
    if "dim" not in g:
        raise ConfigError("geometry.dim is required")
    if kind is GeometryKind.HOMOGENEOUS:
        if "b" in g:
            raise ConfigError("geometry.b applies to CartanHadamardConst only")
        return RadialGeometry.homogeneous(g["dim"], g.get("sphere_area", 1.0))
    if "sphere_area" in g:
        raise ConfigError("geometry.sphere_area applies to Homogeneous only")
    if kind is GeometryKind.HYPERBOLIC:
        if "b" in g:
            raise ConfigError("geometry.b applies to CartanHadamardConst only")
        return RadialGeometry.hyperbolic(g["dim"])
    if "b" not in g:
        raise ConfigError("geometry.b is required for CartanHadamardConst")
    return RadialGeometry.cartan_hadamard(g["dim"], g["b"])


def build_exponents(cfg: dict) -> ExponentSystem:
    e = cfg["exponents"]
    return ExponentSystem(e["p1"], e["p2"], e["q"])


def _build_weight(name: str, spec: dict, geo: RadialGeometry) -> PositiveFunction:
    form = spec.get("form")
    if form == "constant":
        return Constant(spec.get("value", 1.0))
    if form == "custom":
        return CUSTOM_REGISTRY[spec["name"]](spec.get("exponent", 0.0), spec.get("scale", 1.0))
    if "exponent" not in spec:
        raise ConfigError(f"weights.{name}.exponent is required for form {form}")
    if form == "power":
        return Power(spec["exponent"])
    scale = spec.get("scale", geo.scale or 1.0)
    return SinhPower(spec["exponent"], scale)


def build_weights(cfg: dict, geo: RadialGeometry) -> WeightTriple:
    w = cfg["weights"]
    return WeightTriple(*(_build_weight(k, w[k], geo) for k in ("u", "v1", "v2")))


def build_power_datum(cfg: dict) -> PowerDatum:
    geo = build_geometry(cfg)
    w = cfg["weights"]
    want = "power" if geo.scale == 0.0 else "sinh_power"
    for k in ("u", "v1", "v2"):
        if w[k].get("form") != want:
            raise ConfigError(f"weights.{k}.form must be {want} for classify on {geo.kind.value}")
        if want == "sinh_power" and abs(w[k].get("scale", geo.scale) - geo.scale) > 0:
            raise ConfigError(f"weights.{k}.scale must equal the geometry scale {geo.scale:g}")
    return PowerDatum(geo, w["u"]["exponent"], w["v1"]["exponent"], w["v2"]["exponent"],
                          build_exponents(cfg))


def build_quad(cfg: dict) -> QuadConfig:
    q = cfg["quadrature"]
    return QuadConfig(rel_tol=q["rel_tol"], abs_tol=q["abs_tol"])


# --------------------------------------------------------------------------
# commands


@dataclass
class CommandResult:
    code: int
    text: str
    payload: str = ""
    extra: dict = field(default_factory=dict)


def _fmt(v) -> str:
    if v is None:
        return "undetermined"
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return f"{v:.12g}"


def cmd_check(cfg: dict) -> CommandResult:
    geo = build_geometry(cfg)
    report = eval_report(geo, build_weights(cfg, geo), build_exponents(cfg), build_quad(cfg))
    lines = [f"case      {report.case.label()}"]
    for name in report.required:
        lines.append(f"{name:<9} {_fmt(report.B.get(name))}")
    if report.bracket is not None:
        lines.append(f"bracket   [{_fmt(report.c_low)}, {_fmt(report.c_high)}]")
    lines.append(f"holds     {str(report.holds).lower()}")
    lines.extend(f"note      {d}" for d in report.diagnostics)
    if not report.case.covered:
        code = EXIT_NOT_COVERED
    elif report.undetermined:
        code = EXIT_ERROR
    else:
        code = EXIT_OK if report.holds else EXIT_FAILS
    return CommandResult(code, "\n".join(lines), report.to_json(), {"report": report})


def cmd_classify(cfg: dict) -> CommandResult:
    verdict = classify(build_power_datum(cfg))
    lines = [f"verdict   {verdict.kind}", f"case      {verdict.case}", f"reason    {verdict.reason}"]
    for c in verdict.conditions:
        lines.append(f"  {c.name:<28} {c.relation:<2} slack {c.slack:+.6g}  {c.status}")
    lines.extend(f"note      {n}" for n in verdict.notes)
    return CommandResult(VERDICT_EXIT[verdict.kind], "\n".join(lines), verdict.to_json(),
                         {"verdict": verdict})


def cmd_witness(cfg: dict) -> CommandResult:
    geo = build_geometry(cfg)
    exps = build_exponents(cfg)
    lw = build_line_weights(geo, build_weights(cfg, geo), exps)
    w = cfg["witness"]
    search = WitnessSearchConfig(budget=w["budget"], restarts=w["restarts"], seed=w["seed"],
                                 cfg=build_quad(cfg))
    res = search_best_ratio(lw, search)
    p = res.params
    text = (f"best ratio {_fmt(res.ratio)} after {res.evaluations} evaluations\n"
            f"a1 {p['a1']:.6g}  a2 {p['a2']:.6g}  "
            f"t in ({math.exp(p['log_tlo']):.6g}, {math.exp(p['log_thi']):.6g})")
    payload = json.dumps(_jsonable(res.to_dict()), sort_keys=True, indent=2)
    return CommandResult(EXIT_OK, text, payload, {"witness": res, "csv": res.trace_csv()})


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


DEFAULT_SUITE = (
    (RadialGeometry.homogeneous(4.0), WeightTriple(Power(-6.0), Power(3.0), Power(3.0)),
     ExponentSystem(2.0, 2.0, 2.0), PowerTrunc(0.5, 0.1, 10.0), PowerTrunc(0.3, 0.2, 5.0)),
    (RadialGeometry.homogeneous(3.0, 2.5), WeightTriple(Power(-4.5), Power(1.0), Power(0.5)),
     ExponentSystem(2.0, 3.0, 3.0), PowerTrunc(-0.4, 0.05, 2.0), PowerTrunc(1.2, 0.5, 8.0)),
    (RadialGeometry.hyperbolic(2.0), WeightTriple(SinhPower(-2.0), SinhPower(1.0), SinhPower(1.0)),
     ExponentSystem(2.0, 2.0, 2.0), PowerTrunc(0.0, 0.3, 4.0), PowerTrunc(-0.5, 0.1, 2.0)),
    (RadialGeometry.cartan_hadamard(3.0, 2.0),
     WeightTriple(SinhPower(-2.5, math.sqrt(2.0)), SinhPower(0.3, math.sqrt(2.0)),
                  SinhPower(0.2, math.sqrt(2.0))),
     ExponentSystem(3.0, 2.0, 4.0), PowerTrunc(0.7, 0.2, 3.0), PowerTrunc(0.0, 0.4, 6.0)),
)

ROUND_TRIP_TOL = 1e-12
TRANSFER_TOL = 1e-8


def reduction_checks(geo, weights, exps, F1, F2, cfg: QuadConfig | None = None) -> list[dict]:
    """Round trip, LHS transfer and lifted RHS identities for one instance."""
    lw = build_line_weights(geo, weights, exps)
    out = []
    f1, f2 = lift(F1, geo, weights, exps, 1), lift(F2, geo, weights, exps, 2)
    for i, (F, f) in enumerate(((F1, f1), (F2, f2)), start=1):
        ts = np.geomspace(F.lo * (1 + 1e-9), F.hi * (1 - 1e-9), 50)
        err = float(np.max(np.abs(project(f, geo)(ts) / F(ts) - 1.0)))
        out.append({"check": f"round_trip_{i}", "error": err, "tol": ROUND_TRIP_TOL})
        line = rhs_line(F, lw.vt(i), exps.p(i), cfg)
        space = rhs_space(f, weights.v(i), geo, exps.p(i), cfg)
        out.append({"check": f"rhs_transfer_{i}", "error": abs(space / line - 1.0),
                    "tol": TRANSFER_TOL})
    line = lhs_line(F1, F2, lw, exps.q, cfg)
    space = lhs_space(f1, f2, geo, weights.u, exps.q, cfg)
    out.append({"check": "lhs_transfer", "error": abs(space / line - 1.0), "tol": TRANSFER_TOL})
    for row in out:
        row["pass"] = bool(row["error"] <= row["tol"])
    return out


def cmd_reduce_verify(cfg: dict, use_config_datum: bool = False) -> CommandResult:
    quad = build_quad(cfg)
    suite = list(DEFAULT_SUITE)
    if use_config_datum:
        geo = build_geometry(cfg)
        suite = [(geo, build_weights(cfg, geo), build_exponents(cfg), s[3], s[4])
                 for s in DEFAULT_SUITE[:1]]
    rows = []
    for k, inst in enumerate(suite):
        for row in reduction_checks(*inst, cfg=quad):
            rows.append({"instance": k, **row})
    ok = all(r["pass"] for r in rows)
    text = "\n".join(f"[{r['instance']}] {r['check']:<15} err {r['error']:.3e}  "
                     f"{'pass' if r['pass'] else 'FAIL'}" for r in rows)
    payload = json.dumps({"pass": ok, "checks": rows}, sort_keys=True, indent=2)
    return CommandResult(EXIT_OK if ok else EXIT_FAILS, text, payload)


def cmd_calibrate(cfg: dict) -> CommandResult:
    c = cfg["calibrate"]
    p, eps, deltas = c["p"], c["eps"], list(c["deltas"])
    quad = build_quad(cfg)
    ceiling = sharp_constant(p, eps)
    rows = [{"delta": d, "ratio": classic_hardy_calibration(p, eps, d, quad),
             "closed_form": classic_hardy_closed_form(p, eps, d)} for d in deltas]
    ordered = sorted(rows, key=lambda r: -r["delta"])
    increasing = all(a["ratio"] < b["ratio"] for a, b in zip(ordered, ordered[1:]))
    below = all(r["ratio"] < ceiling for r in rows)
    ok = increasing and below
    lines = [f"p = {p:g}, eps = {eps:g}, sharp constant {ceiling:.12g}",
             f"{'delta':>10} {'ratio':>18} {'closed form':>18}"]
    lines += [f"{r['delta']:>10g} {r['ratio']:>18.12g} {r['closed_form']:>18.12g}" for r in ordered]
    payload = json.dumps({"p": p, "eps": eps, "ceiling": ceiling, "rows": ordered,
                          "increasing": increasing, "below_ceiling": below},
                         sort_keys=True, indent=2)
    return CommandResult(EXIT_OK if ok else EXIT_FAILS, "\n".join(lines), payload)


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML run configuration")
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--rel-tol", type=float, help="quadrature relative tolerance")
    common.add_argument("--abs-tol", type=float, help="quadrature absolute tolerance")
    common.add_argument("--seed", type=int, help="witness search seed")
    common.add_argument("--budget", type=int, help="witness evaluation budget")
    common.add_argument("--out", metavar="PATH",
                        help="write the JSON report (witness: the CSV trace) to PATH")
    parser = argparse.ArgumentParser(prog="bihardy",
                                     description="Bilinear Hardy inequality verification.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("check", "evaluate the weight conditions and bracket"),
                            ("classify", "closed-form verdict for power weights"),
                            ("witness", "search truncated-power test pairs"),
                            ("reduce-verify", "check the line/space transfer identities"),
                            ("calibrate", "classical Hardy constant calibration")):
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def run(argv=None) -> CommandResult:
    return dispatch(build_parser().parse_args(argv))


def dispatch(args) -> CommandResult:
    cfg = apply_overrides(load_config(args.config), args)
    if args.command == "check":
        return cmd_check(cfg)
    if args.command == "classify":
        return cmd_classify(cfg)
    if args.command == "witness":
        return cmd_witness(cfg)
    if args.command == "reduce-verify":
        return cmd_reduce_verify(cfg, use_config_datum=args.config is not None)
    return cmd_calibrate(cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        res = dispatch(args)
    except (ConfigError, ExponentDomainError, GeometryDomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (UndeterminedError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(res.payload if args.json else res.text)
    if args.out:
        body = res.extra["csv"] if args.command == "witness" else res.payload + "\n"
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    return res.code


__all__ = ["main", "run", "load_config", "validate_config", "ConfigError", "cmd_check",
           "cmd_classify", "cmd_witness", "cmd_reduce_verify", "cmd_calibrate",
           "reduction_checks", "CUSTOM_REGISTRY", "DEFAULT_CONFIG"]
