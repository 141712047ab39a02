"""Command line interface.

Usage::

    rigidmotion <subcommand> [--input FILE|-] [--format json|table|csv]
                [--degrees] [--translating-point x,y,z] [--resolution N]

Subcommands: decompose, screw, planar, fourth-point, trace, verify.

Exit codes: 0 success, 2 rigidity or handedness violation, 3 parse or
validation error, 4 a computed residual exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .core import (
    EPS_RIGID,
    FourthPointProblem,
    TripleConfiguration,
    axis_angle_from_rotation,
    fourth_point_positions,
    max_relative_error,
    validate_rigidity,
)
from .decomposition import (
    ROTATION,
    SCREW,
    chasles_decompose,
    chasles_independence_check,
    decompose_three_step,
    euler_axis,
    planar_decompose,
    rotation_difference,
    screw_decompose,
)
from .exceptions import (
    DegenerateConfiguration,
    InconsistentConstraints,
    NotRigid,
    RigidMotionError,
    TooFewPoints,
)
from .spherical import build_scene, invariant_point_by_half_angle, invariant_point_by_root, sample_arcs

SUBCOMMANDS = ("decompose", "screw", "planar", "fourth-point", "trace", "verify")

EXIT_OK = 0
EXIT_NOT_RIGID = 2
EXIT_INPUT = 3
EXIT_RESIDUAL = 4


class ConfigError(RigidMotionError, ValueError):
    exit_code = EXIT_INPUT


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass


@dataclass(frozen=True, eq=False)
class ConfigurationFile:
    labels: tuple
    initial: np.ndarray
    final: np.ndarray
    translating_point: np.ndarray | None = None
    mode: str = "3d"

    @property
    def dim(self):
        return 2 if self.mode == "2d" else 3

    def initial_3d(self):
        return _lift(self.initial)

    def final_3d(self):
        return _lift(self.final)


def _lift(a):
    if a.shape[1] == 3:
        return a
    out = np.zeros((len(a), 3))
    out[:, :2] = a
    return out


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where} must be a number")
    x = float(value)
    if not math.isfinite(x):
        raise ValidationError(f"{where} must be finite")
    return x


def _point_list(items, key, mode):
    if not isinstance(items, list):
        raise ValidationError(f"'{key}' must be an array of points")
    coords = ("x", "y") if mode == "2d" else ("x", "y", "z")
    labels, rows = [], []
    for n, item in enumerate(items):
        if not isinstance(item, dict):
            raise ValidationError(f"{key}[{n}] must be an object with label and coordinates")
        label = item.get("label")
        if not isinstance(label, str) or not label:
            raise ValidationError(f"{key}[{n}] needs a non-empty string label")
        if mode == "2d" and "z" in item:
            raise ValidationError(f"{key}[{n}] ({label}): z is not allowed in 2d mode")
        missing = [c for c in coords if c not in item]
        if missing:
            raise ValidationError(f"{key}[{n}] ({label}) is missing {', '.join(missing)}")
        labels.append(label)
        rows.append([_number(item[c], f"{key}[{n}].{c}") for c in coords])
    if len(set(labels)) != len(labels):
        dup = next(lbl for lbl in labels if labels.count(lbl) > 1)
        raise ValidationError(f"duplicate label {dup!r} in '{key}'")
    if len(rows) < 3:
        raise ValidationError(f"'{key}' needs at least 3 points, got {len(rows)}")
    return labels, np.array(rows, dtype=float)


def _vector(value, where):
    if isinstance(value, dict):
        value = [value.get(c) for c in ("x", "y", "z")]
    if not isinstance(value, list) or len(value) != 3:
        raise ValidationError(f"{where} must be [x, y, z] or an object with x, y, z")
    return np.array([_number(v, f"{where}[{i}]") for i, v in enumerate(value)])


def parse_configuration(text):
    """Parse and validate a configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("configuration must be a JSON object")
    mode = doc.get("mode", "3d")
    if mode not in ("3d", "2d"):
        raise ValidationError(f"mode must be '3d' or '2d', got {mode!r}")
    for key in ("initial", "final"):
        if key not in doc:
            raise ValidationError(f"missing required key '{key}'")
    labels, initial = _point_list(doc["initial"], "initial", mode)
    final_labels, final = _point_list(doc["final"], "final", mode)
    if len(final_labels) != len(labels):
        raise ValidationError("'initial' and 'final' must list the same number of points")
    if set(final_labels) != set(labels):
        raise ValidationError("'initial' and 'final' must use the same labels")
    order = [final_labels.index(lbl) for lbl in labels]
    final = final[order]
    tp = doc.get("translating_point")
    if tp is not None:
        tp = _vector(tp, "translating_point")
    return ConfigurationFile(tuple(labels), initial, final, tp, mode)


# -- serialisation -----------------------------------------------------------

def _fmt_float(x):
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, indent=2, _level=0):
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return json.dumps(obj)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and not all(isinstance(v, (int, float)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _table_value(v):
    if isinstance(v, bool) or v is None:
        return str(v).lower()
    if isinstance(v, float):
        return format(v, ".6g")
    if isinstance(v, list):
        return "(" + ", ".join(_table_value(x) for x in v) + ")"
    return str(v)


def render_table(report):
    rows = list(_flatten(report))
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {_table_value(v)}" for k, v in rows)


def render_csv(report):
    buf = io.StringIO()
    buf.write("arc_label,i,x,y,z\n")
    for arc in report["result"]["arcs"]:
        label = arc["label"]
        quoted = '"' + label.replace('"', '""') + '"' if any(c in label for c in ',"') else label
        for i, p in enumerate(arc["points"]):
            buf.write(f"{quoted},{i},{_fmt_float(p[0])},{_fmt_float(p[1])},{_fmt_float(p[2])}\n")
    return buf.getvalue()


# -- subcommands ---------------------------------------------------------------

@dataclass
class Flags:
    degrees: bool = False
    translating_point: np.ndarray | None = None
    resolution: int = 32


class _Report:
    def __init__(self, name, config, flags):
        self.flags = flags
        self.doc = {
            "command": name,
            "angle_unit": "degrees" if flags.degrees else "radians",
            "input": {
                "mode": config.mode,
                "labels": list(config.labels),
                "initial": config.initial.tolist(),
                "final": config.final.tolist(),
            },
            "result": {},
            "checks": [],
        }

    def angle(self, x):
        return math.degrees(x) if self.flags.degrees else float(x)

    def rotation(self, r):
        return {"axis": r.axis.tolist(), "angle": self.angle(r.angle), "axis_defined": r.axis_defined}

    def check(self, name, residual, tolerance):
        residual = float(residual)
        self.doc["checks"].append({
            "name": name,
            "residual": residual,
            "tolerance": tolerance,
            "passed": bool(residual <= tolerance),
        })

    def finish(self):
        passed = all(c["passed"] for c in self.doc["checks"])
        self.doc["status"] = "ok" if passed else "residual-failure"
        return self.doc, EXIT_OK if passed else EXIT_RESIDUAL


def _require_rigid(config):
    report = validate_rigidity(config.initial, config.final)
    if not report.accepted:
        raise NotRigid(report.reason(), report)
    return report


def _triple(config):
    initial = config.initial_3d()
    final = config.final_3d()
    try:
        return TripleConfiguration.from_array(initial[:3], config.labels[:3]), \
            TripleConfiguration.from_array(final[:3], config.labels[:3])
    except DegenerateConfiguration as exc:
        raise ValidationError(f"the first three points must not be collinear: {exc}") from exc


def _translating_point(config, flags, triple):
    if flags.translating_point is not None:
        return np.asarray(flags.translating_point, dtype=float)
    if config.translating_point is not None:
        return config.translating_point
    return triple.p1


def _three_step_record(rep, d):
    return {
        "translation": d.translation.tolist(),
        "ab_axis": d.ab_axis.tolist(),
        "phi": rep.angle(d.phi),
        "second_axis": d.second_axis.tolist(),
        "theta": rep.angle(d.theta),
        "fixed_point": d.fixed_point.tolist(),
    }


def _screw_record(rep, s):
    return {
        "kind": s.kind,
        "axis_point": s.axis_point.tolist(),
        "axis_dir": s.axis_dir.tolist(),
        "angle": rep.angle(s.angle),
        "slide": float(s.slide),
    }


def _cmd_decompose(config, flags, rep):
    _require_rigid(config)
    p, q = _triple(config)
    d = decompose_three_step(p, q)
    rot = euler_axis(d)
    tp = _translating_point(config, flags, p)
    chasles = chasles_decompose(p, q, tp)
    rep.doc["result"] = {
        "three_step": _three_step_record(rep, d),
        "euler_axis": rep.rotation(rot),
        "chasles": {
            "translating_point": tp.tolist(),
            "translation": chasles.translation.tolist(),
            "rotation": rep.rotation(chasles.rotation),
        },
    }
    rep.check("three_step_replay", max_relative_error(d.replay(config.initial_3d()), config.final_3d()), EPS_RIGID)


def _cmd_screw(config, flags, rep):
    _require_rigid(config)
    p, q = _triple(config)
    tp = _translating_point(config, flags, p)
    disp = chasles_decompose(p, q, tp)
    screw = screw_decompose(disp)
    rep.doc["result"] = {
        "translating_point": tp.tolist(),
        "displacement": {"rotation": rep.rotation(disp.rotation), "translation": disp.translation.tolist()},
        "screw": _screw_record(rep, screw),
    }
    pts = config.initial_3d()
    rep.check("screw_reconstruction", max_relative_error(screw.apply(pts), config.final_3d()), EPS_RIGID)


def _cmd_planar(config, flags, rep):
    a = config.initial[:3, :2]
    b = config.final[:3, :2]
    if config.mode != "2d" and (np.any(config.initial[:, 2] != 0) or np.any(config.final[:, 2] != 0)):
        raise ValidationError("planar needs mode '2d' or all z coordinates equal to 0")
    report = validate_rigidity(config.initial[:, :2], config.final[:, :2])
    if not report.accepted:
        raise NotRigid(report.reason(), report)
    try:
        result = planar_decompose(a, b)
    except DegenerateConfiguration as exc:
        raise ValidationError(f"the first three points must not be collinear: {exc}") from exc
    out = {"kind": result.kind}
    if result.kind == ROTATION:
        out["center"] = result.center.tolist()
        out["angle"] = rep.angle(result.angle)
        moved = result.apply(result.center[None, :])[0]
        rep.check("fixed_point_displacement", np.linalg.norm(moved - result.center), 1e-10)
    elif result.translation is not None:
        out["translation"] = result.translation.tolist()
    rep.doc["result"] = out
    rep.check("planar_reconstruction",
              max_relative_error(result.apply(config.initial[:, :2]), config.final[:, :2]), EPS_RIGID)


def _signed_volume(a, b, c, d):
    return float(np.dot(np.cross(b - a, c - a), d - a)) / 6.0


def _cmd_fourth_point(config, flags, rep):
    if len(config.labels) < 4:
        raise ValidationError("fourth-point needs at least 4 points")
    ini, fin = config.initial_3d(), config.final_3d()
    A, B, C = ini[:3]
    A2, B2, C2 = fin[:3]
    scale = max(np.linalg.norm(ini - ini[0], axis=1).max(), 1.0)
    results = []
    verdict = None
    for k in range(3, len(config.labels)):
        D = ini[k]
        d = [float(np.linalg.norm(D - P)) for P in (A, B, C)]
        try:
            sols = fourth_point_positions(FourthPointProblem(A2, B2, C2, *d))
        except InconsistentConstraints as exc:
            raise NotRigid(f"pairwise distances not preserved: {exc}") from exc
        except DegenerateConfiguration as exc:
            raise ValidationError(f"the first three points must not be collinear: {exc}") from exc
        sign = np.sign(_signed_volume(A, B, C, D))
        handed = min(sols, key=lambda s: 0.0 if np.sign(_signed_volume(A2, B2, C2, s)) == sign else 1.0)
        observed = fin[k]
        err = float(np.linalg.norm(observed - handed)) / scale
        mirror_err = min(float(np.linalg.norm(observed - s)) / scale for s in sols)
        results.append({
            "label": config.labels[k],
            "distances": d,
            "solutions": [s.tolist() for s in sols],
            "handed_solution": handed.tolist(),
            "observed": observed.tolist(),
            "observed_error": err,
        })
        if err > EPS_RIGID and verdict is None:
            verdict = "handedness violated" if mirror_err <= EPS_RIGID else "pairwise distances not preserved"
    rep.doc["result"] = {"points": results}
    if verdict is not None:
        raise NotRigid(verdict)


def _scene(config):
    _require_rigid(config)
    p, q = _triple(config)
    d = decompose_three_step(p, q)
    return d, build_scene(d, p.p2 + d.translation, q.p2)


def _cmd_trace(config, flags, rep):
    d, scene = _scene(config)
    arcs = sample_arcs(scene, flags.resolution)
    rep.doc["result"] = {
        "center": scene.center.tolist(),
        "radius": scene.radius,
        "phi": rep.angle(scene.phi),
        "theta": rep.angle(scene.theta),
        "arcs": [{"label": a.label, "points": a.points.tolist()} for a in arcs],
    }
    r = scene.radius
    dev = max(float(np.max(np.abs(np.linalg.norm(a.points - scene.center, axis=1) - r))) for a in arcs)
    rep.check("arc_sphere_membership", dev / max(1.0, r), 1e-10)


def _probe_points(config):
    pts = config.initial_3d()
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.maximum(hi - lo, 1.0)
    grid = np.array([[i, j, k] for i in (-1, 2) for j in (-1, 2) for k in (-1, 2)], dtype=float)
    return np.vstack([pts, lo + grid * span, pts.mean(axis=0)])


def _cmd_verify(config, flags, rep):
    report = _require_rigid(config)
    rep.check("pairwise_distances", report.max_discrepancy, EPS_RIGID)
    p, q = _triple(config)
    d = decompose_three_step(p, q)
    rot = euler_axis(d)
    ini, fin = config.initial_3d(), config.final_3d()
    rep.check("three_step_replay", max_relative_error(d.replay(ini), fin), EPS_RIGID)

    if rot.is_identity:
        rep.check("euler_fixed_axis", 0.0, 1e-10)
    else:
        rep.check("euler_fixed_axis", np.linalg.norm(rot.matrix @ rot.axis - rot.axis), 1e-10)
    oracle = axis_angle_from_rotation(d.second_rotation.matrix @ d.first_rotation.matrix)
    axis_dev, angle_dev = rotation_difference(rot, oracle)
    rep.check("oracle_axis_agreement", axis_dev, 1e-9)
    rep.check("oracle_angle_agreement", angle_dev, 1e-9)

    tp = _translating_point(config, flags, p)
    samples = np.vstack([tp, _probe_points(config)])
    indep = chasles_independence_check(p, q, samples)
    rep.check("chasles_axis_independence", indep.max_axis_deviation, 1e-9)
    rep.check("chasles_angle_independence", indep.max_angle_difference, 1e-9)

    disp = chasles_decompose(p, q, tp)
    screw = screw_decompose(disp)
    probes = _probe_points(config)
    rep.check("screw_reconstruction", max_relative_error(screw.apply(probes), disp.apply(probes)), EPS_RIGID)
    if screw.kind == SCREW:
        moved = disp.apply(screw.axis_point[None, :])[0] - screw.axis_point
        rep.check("screw_translation_parallel", np.linalg.norm(np.cross(moved, screw.axis_dir)), 1e-10)

    result = {
        "three_step": _three_step_record(rep, d),
        "euler_axis": rep.rotation(rot),
        "oracle": rep.rotation(oracle),
        "screw": _screw_record(rep, screw),
    }
    scene = build_scene(d, p.p2 + d.translation, q.p2)
    if not scene.phi_degenerate and abs(d.theta) >= 1e-12:
        x_root = invariant_point_by_root(scene).direction
        x_half = invariant_point_by_half_angle(scene).direction
        composed = scene.composed_matrix
        rep.check("invariant_point_fixed", np.linalg.norm(composed @ x_root - x_root), 1e-9)
        rep.check("invariant_point_antipode_fixed", np.linalg.norm(composed @ -x_root + x_root), 1e-9)
        rep.check("half_angle_agreement", 2.0 * math.asin(min(1.0, 0.5 * np.linalg.norm(x_root - x_half))), 1e-8)
        line_dev = 0.0 if oracle.is_identity else math.atan2(
            np.linalg.norm(np.cross(x_root, oracle.axis)), abs(float(np.dot(x_root, oracle.axis))))
        rep.check("invariant_point_on_oracle_axis", line_dev, 1e-9)
        result["invariant_point"] = scene.to_world(x_root).tolist()

    if config.mode == "2d":
        planar = planar_decompose(config.initial[:3], config.final[:3])
        result["planar"] = {"kind": planar.kind}
        if planar.kind == ROTATION:
            moved = planar.apply(planar.center[None, :])[0]
            rep.check("planar_fixed_point", np.linalg.norm(moved - planar.center), 1e-10)
    rep.doc["result"] = result


_COMMANDS = {
    "decompose": _cmd_decompose,
    "screw": _cmd_screw,
    "planar": _cmd_planar,
    "fourth-point": _cmd_fourth_point,
    "trace": _cmd_trace,
    "verify": _cmd_verify,
}


def run_subcommand(name, config, flags=None):
    """Run one subcommand; return ``(report, exit_code)``.

    Rigidity and input errors are reported in the returned document rather
    than raised.
    """
    flags = flags or Flags()
    if name not in _COMMANDS:
        raise ValueError(f"unknown subcommand {name!r}; expected one of {', '.join(SUBCOMMANDS)}")
    rep = _Report(name, config, flags)
    try:
        _COMMANDS[name](config, flags, rep)
    except NotRigid as exc:
        rep.doc["status"] = "not-rigid"
        rep.doc["error"] = str(exc)
        return rep.doc, EXIT_NOT_RIGID
    except (ConfigError, DegenerateConfiguration, TooFewPoints) as exc:
        rep.doc["status"] = "invalid-input"
        rep.doc["error"] = str(exc)
        return rep.doc, EXIT_INPUT
    return rep.finish()


def _parse_triplet(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected x,y,z") from None
    if len(vals) != 3 or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("expected three finite numbers x,y,z")
    return np.array(vals)


def _positive_int(text):
    n = int(text)
    if n < 8:
        raise argparse.ArgumentTypeError("resolution must be at least 8")
    return n


def build_parser():
    parser = argparse.ArgumentParser(prog="rigidmotion", description="Rigid-body displacement decompositions.")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--input", default="-", help="configuration JSON file, or - for stdin")
    parser.add_argument("--format", choices=("json", "table", "csv"), default="table")
    parser.add_argument("--degrees", action="store_true", help="report angles in degrees")
    parser.add_argument("--translating-point", type=_parse_triplet, metavar="x,y,z")
    parser.add_argument("--resolution", type=_positive_int, default=32, help="trace sampling density (>= 8)")
    return parser


def _emit(text, stream):
    stream.write(text)
    if not text.endswith("\n"):
        stream.write("\n")


def main(argv=None, stdin=None, stdout=None, stderr=None):
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK

    if args.format == "csv" and args.subcommand != "trace":
        _emit("error: --format csv is only available for trace", stderr)
        return EXIT_INPUT
    try:
        if args.input == "-":
            text = stdin.read()
        else:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        config = parse_configuration(text)
    except (OSError, UnicodeDecodeError, ConfigError) as exc:
        _emit(f"error: {exc}", stderr)
        if args.format == "json":
            _emit(dumps({"status": "invalid-input", "error": str(exc)}), stdout)
        return EXIT_INPUT

    flags = Flags(args.degrees, args.translating_point, args.resolution)
    report, code = run_subcommand(args.subcommand, config, flags)
    if code in (EXIT_NOT_RIGID, EXIT_INPUT):
        _emit(f"error: {report['error']}", stderr)
    elif code == EXIT_RESIDUAL:
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        _emit(f"error: residual check failed: {', '.join(failed)}", stderr)

    if args.format == "json":
        _emit(dumps(report), stdout)
    elif args.format == "csv" and code == EXIT_OK:
        stdout.write(render_csv(report))
    else:
        _emit(render_table(report), stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
