"""Scenario configuration, the built-in catalog, runs and result files.

A scenario document has five sections::

    plant:       {name, horizon, initial_state: {kind: fixed|uniform, values | low, high}}
    controller:  {type: ailc|ddilc|compare, variant, eta, input_mode, m_mode, w_plus,
                  ball, theta0, solver: {...}, ddilc: {...}}
    reference:   {family, params}
    disturbance: {kind, params}           (optional, defaults to none)
    run:         {iterations, seed, out, format, verbose}

Unknown keys are rejected so that typos do not silently change a long run.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import math
import os
import re
import time
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
import yaml

from .adaptation import ProjectionBall, Variant
from .controller import INPUT_MODES, M_MODES, ControllerConfig, IterationTrace, mimo_run_experiment, run_experiment
from .ddilc import DdilcParams, run_ddilc_experiment
from .disturbances import DEFAULTS as DIST_DEFAULTS
from .disturbances import KINDS as DIST_KINDS
from .disturbances import DisturbanceSpec, DisturbanceStream
from .errors import ConfigurationError
from .plant import CoupledPlant
from .references import FAMILIES, build_reference
from .solver import SolverConfig
from .systems import PLANTS, example1, example2, fixed_initial, uniform_initial

CSV_COLUMNS = ("k", "t", "x", "r", "e", "u", "epsilon", "a", "w_hat")
SECTIONS = ("plant", "controller", "reference", "disturbance", "run")
REQUIRED_SECTIONS = ("plant", "controller", "reference", "run")
CONTROLLER_TYPES = ("ailc", "ddilc", "compare")
FORMATS = ("csv", "json")


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_vec(v):
    return isinstance(v, (list, tuple)) and len(v) > 0 and all(_is_num(x) for x in v)


_SCHEMA = {
    "plant": {
        "name": (lambda v: v in PLANTS, f"one of {sorted(PLANTS)}"),
        "horizon": (lambda v: _is_int(v) and v >= 2, "an integer >= 2"),
        "initial_state": (lambda v: isinstance(v, dict), "a mapping"),
    },
    "controller": {
        "type": (lambda v: v in CONTROLLER_TYPES, f"one of {CONTROLLER_TYPES}"),
        "variant": (lambda v: v in [m.value for m in Variant], f"one of {[m.value for m in Variant]}"),
        "eta": (lambda v: _is_num(v) or _is_vec(v), "a number or list of numbers"),
        "input_mode": (lambda v: v in INPUT_MODES, f"one of {INPUT_MODES}"),
        "m_mode": (lambda v: v in M_MODES, f"one of {M_MODES}"),
        "w_plus": (lambda v: v is None or (_is_num(v) and v >= 0), "a non-negative number"),
        "ball": (lambda v: isinstance(v, (dict, list)), "a mapping or list of mappings"),
        "theta0": (lambda v: v is None or isinstance(v, list), "a list"),
        "solver": (lambda v: isinstance(v, dict), "a mapping"),
        "ddilc": (lambda v: isinstance(v, dict), "a mapping"),
    },
    "reference": {
        "family": (lambda v: v in FAMILIES, f"one of {sorted(FAMILIES)}"),
        "params": (lambda v: isinstance(v, dict), "a mapping"),
    },
    "disturbance": {
        "kind": (lambda v: v in DIST_KINDS, f"one of {DIST_KINDS}"),
        "params": (lambda v: isinstance(v, dict), "a mapping"),
    },
    "run": {
        "iterations": (lambda v: _is_int(v) and v >= 1, "an integer >= 1"),
        "seed": (lambda v: _is_int(v) and v >= 0, "a non-negative integer"),
        "out": (lambda v: v is None or isinstance(v, str), "a path string"),
        "format": (lambda v: v in FORMATS, f"one of {FORMATS}"),
        "verbose": (lambda v: isinstance(v, bool), "true or false"),
    },
}

_REQUIRED_KEYS = {
    "plant": ("name",),
    "controller": ("type",),
    "reference": ("family",),
    "disturbance": ("kind",),
    "run": ("iterations",),
}

_SECTION_DEFAULTS = {
    "plant": {"horizon": 50, "initial_state": {"kind": "fixed", "values": [0.0]}},
    "controller": {
        "variant": "robust", "eta": 1.0, "input_mode": "direct_solve", "m_mode": "normalized",
        "w_plus": None, "theta0": None, "solver": {}, "ddilc": {},
    },
    "reference": {"params": {}},
    "disturbance": {"params": {}},
    "run": {"seed": 0, "out": None, "format": "csv", "verbose": False},
}

_SOLVER_KEYS = {"d0_lower", "l_prime", "margin_factor", "sample_count", "epsilon_tol", "max_iter_cap", "gain_sign"}
_DDILC_KEYS = {"eta", "rho", "lambda", "mu", "theta0", "u0"}
_INIT_KEYS = {"fixed": {"kind", "values"}, "uniform": {"kind", "low", "high"}}


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario document; :meth:`to_dict` echoes it for reruns."""

    name: str
    plant: dict
    controller: dict
    reference: dict
    disturbance: dict
    run: dict

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "plant": copy.deepcopy(self.plant),
            "controller": copy.deepcopy(self.controller),
            "reference": copy.deepcopy(self.reference),
            "disturbance": copy.deepcopy(self.disturbance),
            "run": copy.deepcopy(self.run),
        }

    def with_overrides(self, **overrides) -> "ScenarioConfig":
        """Replace ``run`` entries (and optionally ``controller_type``); ``None`` keeps the current value."""
        d = self.to_dict()
        ctype = overrides.pop("controller_type", None)
        if ctype is not None:
            d["controller"]["type"] = ctype
        for key, value in overrides.items():
            if value is not None:
                d["run"][key] = value
        return validate_scenario(d)

    @property
    def iterations(self) -> int:
        return self.run["iterations"]

    @property
    def seed(self) -> int:
        return self.run["seed"]


def validate_scenario(doc) -> ScenarioConfig:
    """Validate a parsed document; raises with the list of every problem found."""
    errors: List[str] = []
    if not isinstance(doc, dict):
        raise ConfigurationError("scenario document must be a mapping", ["scenario document must be a mapping"])
    unknown = set(doc) - set(SECTIONS) - {"name", "description"}
    for key in sorted(unknown):
        errors.append(f"unknown top-level key {key!r}")
    for sec in REQUIRED_SECTIONS:
        if sec not in doc:
            errors.append(f"missing section {sec!r}")
    out = {}
    for sec in SECTIONS:
        body = doc.get(sec)
        if body is None:
            if sec == "disturbance":
                body = {"kind": "none"}
            else:
                continue
        if not isinstance(body, dict):
            errors.append(f"section {sec!r} must be a mapping")
            continue
        merged = {**copy.deepcopy(_SECTION_DEFAULTS[sec]), **copy.deepcopy(body)}
        for key in sorted(set(merged) - set(_SCHEMA[sec])):
            errors.append(f"{sec}: unknown key {key!r}")
        for key in _REQUIRED_KEYS[sec]:
            if key not in merged:
                errors.append(f"{sec}: missing key {key!r}")
        for key, (check, desc) in _SCHEMA[sec].items():
            if key in merged and not check(merged[key]):
                errors.append(f"{sec}.{key} must be {desc}, got {merged[key]!r}")
        out[sec] = merged
    if not errors:
        errors += _cross_checks(out)
    if errors:
        raise ConfigurationError(f"{len(errors)} scenario validation error(s): " + "; ".join(errors), errors)
    return ScenarioConfig(name=str(doc.get("name", "custom")), **out)


def _cross_checks(d) -> List[str]:
    errors = []
    plant, ctl, run = d["plant"], d["controller"], d["run"]
    init = plant["initial_state"]
    kind = init.get("kind")
    if kind not in _INIT_KEYS:
        errors.append(f"plant.initial_state.kind must be 'fixed' or 'uniform', got {kind!r}")
    else:
        for key in sorted(set(init) - _INIT_KEYS[kind]):
            errors.append(f"plant.initial_state: unknown key {key!r}")
        if kind == "fixed" and not _is_vec(init.get("values")):
            errors.append("plant.initial_state.values must be a list of numbers")
        if kind == "uniform" and not (_is_num(init.get("low")) and _is_num(init.get("high"))
                                      and init["low"] <= init["high"]):
            errors.append("plant.initial_state needs numeric low <= high")
    for key in sorted(set(ctl["solver"]) - _SOLVER_KEYS):
        errors.append(f"controller.solver: unknown key {key!r}")
    for key, v in ctl["solver"].items():
        if key in ("gain_sign", "l_prime"):
            continue
        if not _is_num(v):
            errors.append(f"controller.solver.{key} must be a number, got {v!r}")
    if ctl["solver"].get("l_prime") is not None and not _is_num(ctl["solver"]["l_prime"]):
        errors.append("controller.solver.l_prime must be a number or null")
    for key in sorted(set(ctl["ddilc"]) - _DDILC_KEYS):
        errors.append(f"controller.ddilc: unknown key {key!r}")
    for key, v in ctl["ddilc"].items():
        if not _is_num(v):
            errors.append(f"controller.ddilc.{key} must be a number, got {v!r}")
    coupled = plant["name"] == "example2"
    if ctl["type"] in ("ailc", "compare") and "ball" not in ctl:
        errors.append("controller: missing key 'ball'")
    if coupled and ctl["type"] != "ailc":
        errors.append("DDILC needs a relative-degree-one plant; example2 supports controller.type 'ailc' only")
    if ctl["variant"] == "known_bound" and ctl["w_plus"] is None:
        errors.append("controller.w_plus is required for the known_bound variant")
    for key in sorted(set(d["reference"]["params"]) - set(FAMILIES.get(d["reference"]["family"], {}))):
        errors.append(f"reference.params: unknown key {key!r}")
    dkind = d["disturbance"]["kind"]
    for key in sorted(set(d["disturbance"]["params"]) - set(DIST_DEFAULTS.get(dkind, {}))):
        errors.append(f"disturbance.params: unknown key {key!r}")
    if not errors:
        try:
            build_controllers(d, n_channels=2 if coupled else 1)
        except ConfigurationError as exc:
            errors += exc.errors
    return errors


def _per_channel(value, n, what):
    if n == 1:
        return [value]
    if isinstance(value, list) and len(value) == n and all(isinstance(v, (dict, list)) for v in value):
        return list(value)
    if isinstance(value, list) and len(value) == n and all(_is_num(v) for v in value) and what == "eta":
        return list(value)
    return [copy.deepcopy(value) for _ in range(n)]


def build_controllers(d, n_channels):
    ctl = d["controller"]
    solver = SolverConfig(**ctl["solver"])
    etas = ctl["eta"] if isinstance(ctl["eta"], list) else [ctl["eta"]] * n_channels
    if len(etas) != n_channels:
        raise ConfigurationError(f"controller.eta needs {n_channels} values")
    cfgs = [ControllerConfig(variant=ctl["variant"], input_mode=ctl["input_mode"], m_mode=ctl["m_mode"],
                             solver=solver, eta=float(e), w_plus=ctl["w_plus"]) for e in etas]
    balls, theta0s = [], []
    if ctl["type"] != "ddilc":
        raw = ctl["ball"]
        raws = raw if isinstance(raw, list) else [raw] * n_channels
        if len(raws) != n_channels:
            raise ConfigurationError(f"controller.ball needs {n_channels} entries")
        for b in raws:
            if not isinstance(b, dict) or set(b) != {"center", "radius"} or not _is_vec(b["center"]) \
                    or not _is_num(b["radius"]):
                raise ConfigurationError("controller.ball entries need numeric 'center' (list) and 'radius'")
            balls.append(ProjectionBall(np.array(b["center"], dtype=float), float(b["radius"])))
        th = ctl["theta0"]
        if th is None:
            theta0s = [None] * n_channels
        elif all(_is_num(v) for v in th):
            theta0s = [np.array(th, dtype=float)] * n_channels
        elif len(th) == n_channels and all(_is_vec(v) for v in th):
            theta0s = [np.array(v, dtype=float) for v in th]
        else:
            raise ConfigurationError("controller.theta0 must be a vector or one vector per channel")
        for b, t0 in zip(balls, theta0s):
            if t0 is not None and t0.shape != b.center.shape:
                raise ConfigurationError("controller.theta0 length must match the ball center")
            if b.center.shape[0] != 4:
                raise ConfigurationError("built-in plants have 4 parameters; ball center must have length 4")
    dd = {("lam" if k == "lambda" else k): v for k, v in ctl["ddilc"].items()}
    ddilc = DdilcParams(**dd)
    return cfgs, balls, theta0s, ddilc


# -- built-in catalog -------------------------------------------------------

_EX1_BALL = {"center": [1.0, 1.0, 1.0, 1.0], "radius": 0.9}
_EX2_BALLS = [
    {"center": [7.13, 29.98, 12.52, 39.97], "radius": 0.11},
    {"center": [9.63, 24.02, 9.98, 32.02], "radius": 0.11},
]
_EX1_SOLVER = {"d0_lower": 0.5, "epsilon_tol": 1e-6}
_EX2_SOLVER = {"d0_lower": 1.0, "epsilon_tol": 1e-6}
_DDILC = {"eta": 0.5, "rho": 0.4, "lambda": 1.0, "mu": 0.5, "theta0": 1.0, "u0": 0.0}
_TABLE1 = ("uniform", "gaussian", "bernoulli_like", "trigonometric", "hoim", "state_dependent")


def catalog_documents() -> Dict[str, dict]:
    cat = {
        "example1-compare": {
            "description": "Example 1, disturbance-free AILC against DDILC; invariant then alternating reference",
            "plant": {"name": "example1", "horizon": 50, "initial_state": {"kind": "fixed", "values": [0.0]}},
            "controller": {"type": "compare", "variant": "disturbance_free", "eta": 1.9,
                           "input_mode": "direct_solve", "ball": _EX1_BALL, "theta0": [1.0, 1.0, 1.0, 1.0],
                           "solver": _EX1_SOLVER, "ddilc": _DDILC},
            "reference": {"family": "example1-compare"},
            "disturbance": {"kind": "none"},
            "run": {"iterations": 200, "seed": 0},
        },
    }
    for i, kind in enumerate(_TABLE1, start=1):
        cat[f"example1-robust-d{i}"] = {
            "description": f"Example 1, robust AILC under the {kind} disturbance; sine/square reference",
            "plant": {"name": "example1", "horizon": 50,
                      "initial_state": {"kind": "uniform", "low": 0.0, "high": 0.01}},
            "controller": {"type": "ailc", "variant": "robust", "eta": 1.9, "input_mode": "direct_solve",
                           "ball": _EX1_BALL, "theta0": [1.0, 1.0, 1.0, 1.0], "solver": _EX1_SOLVER},
            "reference": {"family": "example1-robust"},
            "disturbance": {"kind": kind},
            "run": {"iterations": 200, "seed": 0},
        }
    for name, variant, dist in (("example2-nodist", "disturbance_free", "none"),
                                ("example2-dist", "robust", "example2_channel")):
        cat[name] = {
            "description": f"Example 2, double inverted pendulum, {variant} AILC",
            "plant": {"name": "example2", "horizon": 50,
                      "initial_state": {"kind": "uniform", "low": 0.0, "high": 0.1}},
            "controller": {"type": "ailc", "variant": variant, "eta": 0.1, "input_mode": "direct_solve",
                           "ball": _EX2_BALLS, "theta0": [0.0, 0.0, 0.0, 0.0], "solver": _EX2_SOLVER},
            "reference": {"family": "sine", "params": {"amplitude": 0.1, "period": 25.0}},
            "disturbance": {"kind": dist},
            "run": {"iterations": 200, "seed": 0},
        }
    return cat


def builtin_scenarios() -> Dict[str, ScenarioConfig]:
    return {name: validate_scenario({"name": name, **doc}) for name, doc in catalog_documents().items()}


def get_scenario(name: str) -> ScenarioConfig:
    cat = catalog_documents()
    if name not in cat:
        raise ConfigurationError(f"unknown built-in scenario {name!r}; available: {sorted(cat)}")
    return validate_scenario({"name": name, **cat[name]})


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads ``1e-6`` style exponents as floats."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^[-+]?(?:[0-9][0-9_]*)(?:\.[0-9_]*)?[eE][-+]?[0-9]+$|^[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?$|^[-+]?\.[0-9_]+(?:[eE][-+]?[0-9]+)?$|^[-+]?\.(?:inf|Inf|INF)$|^\.(?:nan|NaN|NAN)$"""),
    list("-+0123456789."),
)


def parse_document(text: str):
    try:
        return yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"malformed scenario document: {exc}") from None


def load_scenario(text: str) -> ScenarioConfig:
    """Parse a YAML/JSON scenario document, or the name of a built-in."""
    doc = parse_document(text)
    if isinstance(doc, str) and doc in catalog_documents():
        return get_scenario(doc)
    if doc is None:
        doc = {}
    return validate_scenario(doc)


def load_scenario_file(path: str) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read scenario file {path}: {exc}") from None
    cfg = load_scenario(text)
    if cfg.name == "custom":
        cfg = validate_scenario({**cfg.to_dict(), "name": os.path.splitext(os.path.basename(path))[0]})
    return cfg


# -- running ----------------------------------------------------------------

def build_plant(cfg: ScenarioConfig):
    p = cfg.plant
    init = p["initial_state"]
    if p["name"] == "example2":
        if init["kind"] == "fixed":
            vals = init["values"]
            inits = [fixed_initial(vals[2 * i: 2 * i + 2] if len(vals) == 4 else vals) for i in range(2)]
        else:
            inits = [uniform_initial(init["low"], init["high"], 2, cfg.seed, stream=i + 1) for i in range(2)]
        return example2(seed=cfg.seed, horizon=p["horizon"], initial_states=inits)
    if init["kind"] == "fixed":
        initial = fixed_initial(init["values"])
    else:
        initial = uniform_initial(init["low"], init["high"], 1, cfg.seed, stream=0)
    return example1(initial_states=initial, horizon=p["horizon"])


def _streams(cfg: ScenarioConfig, n: int):
    kind = cfg.disturbance["kind"]
    params = dict(cfg.disturbance["params"])
    out = []
    for i in range(n):
        p = dict(params)
        if kind == "example2_channel" and "channel" not in params:
            p["channel"] = i + 1
        out.append(DisturbanceStream(DisturbanceSpec(kind, p, cfg.seed), channel=i))
    return out


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    traces: Dict[str, List[IterationTrace]]
    final_theta_hat: Dict[str, np.ndarray] = field(default_factory=dict)
    final_w_hat: Dict[str, np.ndarray] = field(default_factory=dict)
    disturbance_sup: Dict[str, float] = field(default_factory=dict)
    wall_clock: float = 0.0


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    t0 = time.perf_counter()
    plant = build_plant(cfg)
    ref = build_reference(cfg.reference["family"], cfg.reference["params"])
    ctype = cfg.controller["type"]
    verbose = cfg.run["verbose"]
    K = cfg.iterations
    result = ScenarioResult(cfg, {})
    if isinstance(plant, CoupledPlant):
        n = len(plant.channels)
        cfgs, balls, theta0s, _ = build_controllers(cfg.to_dict(), n)
        adapts = [c.adapt_state(plant.n_times, b, t0_) for c, b, t0_ in zip(cfgs, balls, theta0s)]
        streams = _streams(cfg, n)
        per = mimo_run_experiment(plant, adapts, cfgs, [ref] * n, streams, K, verbose=verbose)
        for i in range(n):
            label = f"ailc.ch{i + 1}"
            result.traces[label] = per[i]
            result.final_theta_hat[label] = adapts[i].theta_hat.copy()
            result.final_w_hat[label] = adapts[i].w_hat.copy()
            result.disturbance_sup[label] = streams[i].sup
    else:
        cfgs, balls, theta0s, ddilc = build_controllers(cfg.to_dict(), 1)
        if ctype in ("ailc", "compare"):
            adapt = cfgs[0].adapt_state(plant.n_times, balls[0], theta0s[0])
            stream = _streams(cfg, 1)[0]
            result.traces["ailc"] = run_experiment(plant, adapt, cfgs[0], ref, stream, K, verbose=verbose)
            result.final_theta_hat["ailc"] = adapt.theta_hat.copy()
            result.final_w_hat["ailc"] = adapt.w_hat.copy()
            result.disturbance_sup["ailc"] = stream.sup
        if ctype in ("ddilc", "compare"):
            stream = _streams(cfg, 1)[0]
            result.traces["ddilc"] = run_ddilc_experiment(plant, ddilc, ref, stream, K)
            result.disturbance_sup["ddilc"] = stream.sup
    result.wall_clock = time.perf_counter() - t0
    return result


def summarize(result: ScenarioResult) -> dict:
    """Run summary: per-k error metrics per controller, final estimates, config echo."""
    controllers = {}
    for label, traces in result.traces.items():
        entry = {
            "max_err": [tr.max_err for tr in traces],
            "avg_err": [tr.avg_err for tr in traces],
            "disturbance_sup": result.disturbance_sup.get(label),
        }
        if label in result.final_theta_hat:
            entry["final_theta_hat"] = result.final_theta_hat[label].tolist()
            w = result.final_w_hat[label]
            entry["w_hat_limits"] = {"min": float(np.min(w)), "max": float(np.max(w)), "per_t": w.tolist()}
        controllers[label] = entry
    return {
        "scenario": result.config.name,
        "iterations": result.config.iterations,
        "controllers": controllers,
        "wall_clock_s": result.wall_clock,
        "config": result.config.to_dict(),
    }


def _fmt(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.16e" % v


def trace_rows(traces: List[IterationTrace]):
    for tr in traces:
        x_next, e = tr.x_next, tr.e
        for t in range(len(tr.u)):
            yield (tr.k, t, x_next[t], tr.r[t], e[t], tr.u[t], tr.epsilon[t], tr.a[t], tr.w_hat[t])


def traces_to_csv(traces: List[IterationTrace]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in trace_rows(traces):
        w.writerow([row[0], row[1]] + [_fmt(v) for v in row[2:]])
    return buf.getvalue()


def _solver_csv(traces: List[IterationTrace]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("k", "t", "iterations", "p0", "residual", "l_prime", "stop_reason"))
    for tr in traces:
        if tr.solver_iterations is None:
            continue
        for t in range(len(tr.u)):
            w.writerow((tr.k, t, int(tr.solver_iterations[t]), int(tr.solver_p0[t]),
                        _fmt(tr.solver_residual[t]), _fmt(tr.solver_l_prime[t]), tr.solver_stop[t]))
    return buf.getvalue()


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def emit_results(result: ScenarioResult, out_dir: str, fmt: str = "csv", summary=None,
                 verbose: bool = False) -> List[str]:
    """Write per-step traces and the JSON summary; returns the written paths."""
    if not result.traces or not any(result.traces.values()):
        raise ConfigurationError("nothing to emit: no traces")
    if fmt not in FORMATS:
        raise ConfigurationError(f"format must be one of {FORMATS}")
    summary = summary if summary is not None else summarize(result)
    name = result.config.name
    written = []

    def write(path, text):
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(exc.errno, f"cannot write results to {path}: {exc.strerror}") from exc
        written.append(path)

    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot create output directory {out_dir}: {exc.strerror}") from exc
    for label, traces in result.traces.items():
        if fmt == "csv":
            write(os.path.join(out_dir, f"{name}.{label}.csv"), traces_to_csv(traces))
        else:
            rows = [dict(zip(CSV_COLUMNS, (r[0], r[1], *map(float, r[2:])))) for r in trace_rows(traces)]
            write(os.path.join(out_dir, f"{name}.{label}.json"),
                  json.dumps(_json_safe({"columns": list(CSV_COLUMNS), "rows": rows}), indent=1) + "\n")
        if verbose:
            write(os.path.join(out_dir, f"{name}.{label}.solver.csv"), _solver_csv(traces))
    write(os.path.join(out_dir, f"{name}.summary.json"), json.dumps(_json_safe(summary), indent=2) + "\n")
    return written
