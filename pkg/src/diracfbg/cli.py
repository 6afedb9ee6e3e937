"""Command-line interface: ``diracfbg {bands,tamm,spectrum,units}``.

Each subcommand reads an optional JSON config (``--config``), applies inline
overrides (``--set key.path=value``), fills defaults and writes CSV or JSON.
CSV outputs get a ``<path>.json`` sidecar holding the resolved config and the
command summary. Exit codes: 0 ok, 2 config/validation error, 3 too many
numerical failures.
"""

from __future__ import annotations

import argparse
import ast
import copy
import csv
import io
import json
import math
import operator
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bands import bloch_momentum, dispersion_rhs, find_bands
from .builders import (
    ApodizationSpec,
    KPGratingSpec,
    TammGratingSpec,
    UniformGratingSpec,
    build_kp_grating,
    build_tamm_grating,
    build_uniform_grating,
)
from .core import DegenerateBarrier, DiracFBGError, DiracParams
from .tamm import find_tamm_states
from .tmm import scattering, sweep
from .units import derive_scales, detuning_to_frequency, length_to_physical

SCHEMA_VERSION = 1
FAIL_FRACTION = 0.01
DB_FLOOR = -300.0

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_REF_LATTICE = {"m0": 1.0, "V0": math.pi / 2, "a": 2.0}
_REF_SCALES = {"n0": 1.45, "delta_n": 1e-4, "lambda_B": 1560e-9}

DEFAULTS = {
    "bands": {
        "params": dict(_REF_LATTICE),
        "grid": {"min": -6.0, "max": 6.0, "points": 4001},
        "scan_points": None,
        "edge_tolerance": 1e-10,
    },
    "tamm": {
        "params": dict(_REF_LATTICE, V1=0.8),
        "tolerance": 1e-10,
        "scales": None,
    },
    "spectrum": {
        "grating": {
            "type": "kp",
            "m0": 1.0,
            "V0": math.pi / 2,
            "a": 2.0,
            "V1": 0.8,
            "L": 50.0,
            "phase_slope": 0.0,
            "apodized": True,
            "slips_in_ramps": True,
            "apod": {"order": 3, "ramp_width": None, "plateau_fraction": 0.6, "segments_per_ramp": 4000},
        },
        "grid": {"min": -6.0, "max": 6.0, "points": 4001},
        "resonance_prominence_db": 10.0,
    },
    "units": {
        "scales": dict(_REF_SCALES),
        "energies": [],
        "lengths": [],
    },
}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}


def _eval_number(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_number(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_number(node.left), _eval_number(node.right))
    raise ValueError("not a numeric expression")


def parse_value(text: str):
    """JSON literal, else an arithmetic expression in numbers and ``pi``, else a bare string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    try:
        return float(_eval_number(ast.parse(text, mode="eval").body))
    except (SyntaxError, ValueError, ZeroDivisionError):
        return text


def _resolve_numbers(obj):
    if isinstance(obj, dict):
        return {k: _resolve_numbers(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_resolve_numbers(v) for v in obj]
    if isinstance(obj, str):
        v = parse_value(obj)
        return v if isinstance(v, float) else obj
    return obj


def _merge(base, override, path=""):
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(out.get(k), dict) and isinstance(v, dict):
            out[k] = _merge(out[k], v, f"{path}{k}.")
        else:
            out[k] = v
    return out


def apply_set(cfg: dict, assignment: str):
    if "=" not in assignment:
        raise ConfigError(f"--set expects key=value, got {assignment!r}")
    key, text = assignment.split("=", 1)
    parts = key.strip().split(".")
    node = cfg
    for part in parts[:-1]:
        if node.get(part) is None:
            node[part] = {}
        if not isinstance(node[part], dict):
            raise ConfigError(f"--set {key}: {part!r} is not a section")
        node = node[part]
    node[parts[-1]] = parse_value(text.strip())


def load_config(command: str, path=None, sets=()) -> dict:
    user = {}
    if path is not None:
        try:
            user = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON in {path}: {exc}") from None
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
    version = user.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    cmd = user.pop("command", command)
    if cmd != command:
        raise ConfigError(f"config is for command {cmd!r}, not {command!r}")
    cfg = _merge(dict(DEFAULTS[command], output={"format": COMMANDS[command][1], "path": None}), user)
    for s in sets:
        apply_set(cfg, s)
    cfg = _resolve_numbers(cfg)
    cfg["schema_version"] = SCHEMA_VERSION
    cfg["command"] = command
    return cfg


def _num(section: dict, key: str, where: str) -> float:
    v = section.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key} must be a finite number, got {v!r}")
    return float(v)


def _grid(cfg) -> np.ndarray:
    g = cfg.get("grid") or {}
    lo, hi = _num(g, "min", "grid"), _num(g, "max", "grid")
    n = g.get("points")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ConfigError(f"grid.points must be an integer >= 2, got {n!r}")
    if not lo < hi:
        raise ConfigError(f"grid.min < grid.max violated: {lo} >= {hi}")
    return np.linspace(lo, hi, n)


def _lattice(cfg, tamm=False) -> DiracParams:
    p = cfg.get("params") or {}
    V1 = _num(p, "V1", "params") if tamm else None
    return DiracParams(m0=_num(p, "m0", "params"), V0=_num(p, "V0", "params"), a=_num(p, "a", "params"), V1=V1)


def _scales(section):
    return derive_scales(_num(section, "n0", "scales"), _num(section, "delta_n", "scales"), _num(section, "lambda_B", "scales"))


def build_grating(gcfg: dict):
    """Grating profile plus a short description from the ``grating`` block."""
    ad = gcfg.get("apod") or {}
    try:
        apod = ApodizationSpec(
            order=int(ad.get("order", 3)),
            ramp_width=None if ad.get("ramp_width") is None else float(ad["ramp_width"]),
            plateau_fraction=float(ad.get("plateau_fraction", 0.6)),
            segments_per_ramp=int(ad.get("segments_per_ramp", 4000)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid grating.apod block: {exc}") from None
    kind = gcfg.get("type")
    common = dict(m0=_num(gcfg, "m0", "grating"), L=_num(gcfg, "L", "grating"), apod=apod)
    if kind == "kp":
        spec = KPGratingSpec(V0=_num(gcfg, "V0", "grating"), a=_num(gcfg, "a", "grating"),
                             slips_in_ramps=bool(gcfg.get("slips_in_ramps", True)), **common)
        return build_kp_grating(spec), apod
    if kind == "tamm":
        spec = TammGratingSpec(V0=_num(gcfg, "V0", "grating"), a=_num(gcfg, "a", "grating"),
                               V1=_num(gcfg, "V1", "grating"),
                               slips_in_ramps=bool(gcfg.get("slips_in_ramps", True)), **common)
        return build_tamm_grating(spec), apod
    if kind == "uniform":
        spec = UniformGratingSpec(phase_slope=_num(gcfg, "phase_slope", "grating"),
                                  apodized=bool(gcfg.get("apodized", True)), **common)
        return build_uniform_grating(spec), apod
    raise ConfigError(f"grating.type must be one of kp, tamm, uniform; got {kind!r}")


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_table(cfg, header, rows, meta, fmt_name, path):
    if fmt_name == "json":
        cols = {h: [] for h in header}
        for row in rows:
            for h, v in zip(header, row):
                cols[h].append(None if v is None else (bool(v) if isinstance(v, (bool, np.bool_)) else float(v)))
        _emit(_json_text(dict(meta, config=cfg, columns=cols)), path)
        return
    _emit(_csv_text(header, rows), path)
    meta_text = _json_text(dict(meta, config=cfg))
    if path is None:
        sys.stderr.write(meta_text)
    else:
        Path(str(path) + ".json").write_text(meta_text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_bands(cfg, fmt_name="csv", out=None) -> int:
    p = _lattice(cfg)
    E = _grid(cfg)
    tol = _num(cfg, "edge_tolerance", "bands")
    sp = cfg.get("scan_points")
    bs = find_bands(p, (float(E[0]), float(E[-1])), scan_points=sp, edge_tolerance=tol)
    rhs = dispersion_rhs(E, p)
    rows = []
    for e, r in zip(E, rhs):
        q = bloch_momentum(e, p)
        rows.append((e, r, q is not None, q))
    meta = {
        "bands": [[lo, hi] for lo, hi in bs.bands],
        "gaps": [[lo, hi] for lo, hi in bs.gaps],
        "edges": bs.edges,
    }
    _write_table(cfg, ["E", "rhs", "in_band", "q"], rows, meta, fmt_name, out)
    return EXIT_OK


def cmd_tamm(cfg, fmt_name="json", out=None) -> int:
    p = _lattice(cfg, tamm=True)
    tol = _num(cfg, "tolerance", "tamm")
    scales = _scales(cfg["scales"]) if cfg.get("scales") else None
    states = find_tamm_states(p, tolerance=tol)
    report = []
    for s in states:
        bs = find_bands(p, (s.E0 - 2.0, s.E0 + 2.0))
        gap = next([lo, hi] for lo, hi in bs.gaps if lo <= s.E0 <= hi)
        entry = {"E0": s.E0, "K": s.K, "kappa": s.kappa, "residual": s.residual, "gap": gap}
        if scales is not None:
            entry["detuning"] = {"value": detuning_to_frequency(s.E0, scales) * 1e-9, "unit": "GHz"}
        report.append(entry)
    _emit(_json_text({"config": cfg, "states": report}), out)
    return EXIT_OK


def find_resonances(E, T_db, prominence_db):
    from scipy.signal import find_peaks

    idx, props = find_peaks(T_db, prominence=prominence_db)
    return [
        {"E": float(E[i]), "T_dB": float(T_db[i]), "prominence_dB": float(pr)}
        for i, pr in zip(idx, props["prominences"])
    ]


def surface_state_peaks(g, gcfg: dict, E, T_db, half_width=0.01, points=2001):
    """Tamm-state resonances of a Tamm grating.

    The peak is far narrower than a typical sweep step, so each lattice
    state gets a dense local sweep over ``E0 +- half_width`` followed by a
    bounded maximization of ``|t|^2``.
    """
    from scipy.optimize import minimize_scalar

    p = DiracParams(gcfg["m0"], gcfg["V0"], gcfg["a"], V1=gcfg["V1"])
    try:
        states = find_tamm_states(p)
    except DegenerateBarrier:
        return []
    out = []
    for s in states:
        i = int(np.argmin(np.abs(E - s.E0)))
        local = np.linspace(s.E0 - half_width, s.E0 + half_width, points)
        T_loc = sweep(g, local, strict=False).transmission
        j = int(np.nanargmax(T_loc))
        lo, hi = local[max(j - 1, 0)], local[min(j + 1, points - 1)]
        res = minimize_scalar(lambda x: -abs(scattering(g, x)[0]) ** 2, bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12})
        out.append({
            "E0": s.E0,
            "grid_E": float(E[i]),
            "grid_T_dB": float(T_db[i]),
            "peak_E": float(res.x),
            "peak_T_dB": float(10 * math.log10(max(-res.fun, 1e-300))),
        })
    return out


def cmd_spectrum(cfg, fmt_name="csv", out=None) -> int:
    E = _grid(cfg)
    g, apod = build_grating(cfg.get("grating") or {})
    resp = sweep(g, E, strict=False)
    T = resp.transmission
    T_db = resp.transmission_db(DB_FLOOR)
    rows = []
    for i in range(E.size):
        if resp.ok[i]:
            rows.append((E[i], T[i], T_db[i], resp.reflection[i], np.angle(resp.t[i]), resp.conservation_residual[i], True))
        else:
            rows.append((E[i], None, None, None, None, None, False))
    n_fail = int((~resp.ok).sum())
    L = g.total_length
    P = apod.plateau_fraction * L / 2
    meta = {
        "grating": {
            "digest": g.digest(),
            "n_elements": len(g.elements),
            "n_segments": len(g.segments),
            "n_slips": len(g.slips),
            "total_length": L,
            "ramp_step": (L / 2 - P) / apod.segments_per_ramp,
        },
        "failures": n_fail,
        "resonances": find_resonances(E[resp.ok], T_db[resp.ok], float(cfg.get("resonance_prominence_db", 10.0))),
    }
    gcfg = cfg.get("grating") or {}
    if gcfg.get("type") == "tamm":
        meta["surface_states"] = surface_state_peaks(g, gcfg, E, T_db)
    _write_table(cfg, ["E", "T", "T_dB", "R", "arg_t", "conservation_residual", "ok"], rows, meta, fmt_name, out)
    return EXIT_NUMERIC if n_fail > FAIL_FRACTION * E.size else EXIT_OK


def cmd_units(cfg, fmt_name="json", out=None) -> int:
    sc = _scales(cfg.get("scales") or {})
    energies = [float(x) for x in cfg.get("energies") or []]
    lengths = [float(x) for x in cfg.get("lengths") or []]
    report = {
        "config": cfg,
        "Z": {"value": sc.Z * 1e3, "unit": "mm"},
        "T": {"value": sc.T * 1e12, "unit": "ps"},
        "f_unit": {"value": sc.f_unit * 1e-9, "unit": "GHz"},
        "detunings": [{"E": e, "value": detuning_to_frequency(e, sc) * 1e-9, "unit": "GHz"} for e in energies],
        "lengths": [{"x": x, "value": length_to_physical(x, sc) * 1e3, "unit": "mm"} for x in lengths],
    }
    _emit(_json_text(report), out)
    return EXIT_OK


COMMANDS = {
    "bands": (cmd_bands, "csv", "Dirac-Kronig-Penney dispersion table and band intervals"),
    "tamm": (cmd_tamm, "json", "relativistic Tamm surface-state energies"),
    "spectrum": (cmd_spectrum, "csv", "transfer-matrix transmission spectrum of a grating"),
    "units": (cmd_units, "json", "normalized <-> physical fibre scales"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diracfbg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, default_fmt, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config entry, e.g. params.V0=pi/2 (repeatable)")
        sp.add_argument("-o", "--output", help="output path (default: stdout)")
        sp.add_argument("--format", choices=["csv", "json"], help=f"output format (default: {default_fmt})")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fn, _, _ = COMMANDS[args.command]
    try:
        cfg = load_config(args.command, args.config, args.set)
        if args.format:
            cfg["output"]["format"] = args.format
        if args.output:
            cfg["output"]["path"] = args.output
        fmt_name = cfg["output"].get("format")
        if fmt_name not in ("csv", "json"):
            raise ConfigError(f"output.format must be csv or json, got {fmt_name!r}")
        return fn(cfg, fmt_name, cfg["output"].get("path"))
    except (ConfigError, DiracFBGError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
