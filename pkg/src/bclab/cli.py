"""Command-line front end.

Subcommands
-----------
generate      integrate a profile (or pick a reference surface) and write
              ``profile.csv``, ``manifest.json`` and optionally ``slice.obj``
verify        run the verification suites on a manifest; ``report.json``/``.csv``
classify      principal-curvature multiplicity pattern over a grid
scan-lambda   null-2-type lambda statistics over a grid
report        plain-text summary of a ``report.json``

Exit codes: 0 pass, 2 bad input or ODE failure, 3 I/O failure,
4 verification failure, 5 precondition (``s1`` vanishes) failure.  Errors
are printed to stderr as one line of JSON.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import analysis, factory, grids, suites
from .errors import BclabError, MeanCurvatureVanishes
from .geometry import curvature_spectrum
from .profile import FAMILIES, POLE_TOL, integrate_profile, profile_from_csv
from .report import digest, dumps, format_float

EXIT_OK, EXIT_INPUT, EXIT_IO, EXIT_VERIFY, EXIT_PRECONDITION = 0, 2, 3, 4, 5
MAX_DIMENSION = 8
MANIFEST_FORMAT = "bclab-manifest-1"

# flag defaults; a config file overrides these and explicit flags override both
DEFAULTS = {
    "generate": {
        "family": None,
        "p": 2,
        "q": 2,
        "initial": [1.0, 1.0, math.pi / 4],
        "s_max": 0.5,
        "local_tol": 1e-10,
        "pole_tol": POLE_TOL,
        "samples": 201,
        "n": 3,
        "r": 1.0,
        "R": 2.0,
        "semi_axes": [1.0, 1.3, 1.7],
        "obj": False,
        "obj_res": 24,
        "out": ".",
    },
    "verify": {
        "manifest": None,
        "grid": [20, 5],
        "codazzi_points": 50,
        "tol_h": 1e-6,
        "tol_codazzi": 1e-4,
        "tol_structural": 1e-6,
        "tol_slice": 1e-8,
        "tol_unit_speed": 1e-8,
        "tol_profile_curvature": 1e-7,
        "out": ".",
    },
    "classify": {"manifest": None, "grid": [20, 5], "out": None},
    "scan-lambda": {
        "manifest": None,
        "grid": [20, 5],
        "lambda_tol": analysis.LAMBDA_TOL,
        "s1_floor": analysis.S1_FLOOR,
        "h_lb": analysis.H_LB,
        "out": "scan.json",
    },
    "report": {"input": None, "out": None},
}

# keys that name files; they do not enter the config digest
PATH_KEYS = {"out", "manifest", "input"}


class CliError(Exception):
    def __init__(self, code, message, kind="InputError"):
        super().__init__(message)
        self.code = code
        self.kind = kind


# ---------------------------------------------------------------------------
# argument parsing


def _grid(text):
    parts = [p for p in str(text).lower().replace("x", ",").split(",") if p]
    try:
        counts = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 20x5, got {text!r}") from None
    if not counts or any(c < 1 for c in counts):
        raise argparse.ArgumentTypeError("grid counts must be positive")
    return counts


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_INPUT, message, "UsageError")


def build_parser():
    parser = _Parser(prog="bclab", description="Build and verify hypersurfaces with three principal curvatures.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    S = argparse.SUPPRESS

    def common(p):
        p.add_argument("--config", help="JSON file whose keys mirror the flags (flags win)")
        return p

    g = common(sub.add_parser("generate", help="integrate a profile and write the surface manifest"))
    g.add_argument("--family", default=S, choices=FAMILIES + tuple(factory.REFERENCE_KINDS))
    g.add_argument("--p", type=int, default=S)
    g.add_argument("--q", type=int, default=S)
    g.add_argument("--initial", type=float, nargs=3, metavar=("PSI0", "PHI0", "THETA0"), default=S)
    g.add_argument("--s-max", dest="s_max", type=float, default=S)
    g.add_argument("--local-tol", dest="local_tol", type=float, default=S)
    g.add_argument("--pole-tol", dest="pole_tol", type=float, default=S)
    g.add_argument("--samples", type=int, default=S)
    g.add_argument("--n", type=int, default=S, help="dimension for sphere, plane, torus")
    g.add_argument("--r", type=float, default=S, help="radius for sphere, round_cylinder, torus tube")
    g.add_argument("--R", type=float, default=S, help="core radius for torus")
    g.add_argument("--semi-axes", dest="semi_axes", type=float, nargs="+", default=S)
    g.add_argument("--obj", action="store_true", default=S, help="also write a 3-D slice mesh")
    g.add_argument("--obj-res", dest="obj_res", type=int, default=S)
    g.add_argument("--out", default=S, help="output directory")

    v = common(sub.add_parser("verify", help="run the verification suites"))
    v.add_argument("--manifest", default=S)
    v.add_argument("--grid", type=_grid, default=S, help="tensor grid counts, e.g. 20x5")
    v.add_argument("--codazzi-points", dest="codazzi_points", type=int, default=S)
    for key in ("h", "codazzi", "structural", "slice", "unit_speed", "profile_curvature"):
        v.add_argument(f"--tol-{key.replace('_', '-')}", dest=f"tol_{key}", type=float, default=S)
    v.add_argument("--out", default=S, help="output directory")

    c = common(sub.add_parser("classify", help="principal curvature pattern over a grid"))
    c.add_argument("--manifest", default=S)
    c.add_argument("--grid", type=_grid, default=S)
    c.add_argument("--out", default=S, help="JSON file (stdout if omitted)")

    s = common(sub.add_parser("scan-lambda", help="null-2-type lambda statistics"))
    s.add_argument("--manifest", default=S)
    s.add_argument("--grid", type=_grid, default=S)
    s.add_argument("--lambda-tol", dest="lambda_tol", type=float, default=S)
    s.add_argument("--s1-floor", dest="s1_floor", type=float, default=S)
    s.add_argument("--h-lb", dest="h_lb", type=float, default=S)
    s.add_argument("--out", default=S, help="JSON file")

    r = common(sub.add_parser("report", help="summarize a verification report"))
    r.add_argument("--input", default=S, help="report.json written by verify")
    r.add_argument("--out", default=S, help="text file (stdout if omitted)")
    return parser


def resolve_config(argv):
    """Merge defaults, the optional ``--config`` file and explicit flags."""
    ns = build_parser().parse_args(argv)
    flags = vars(ns)
    command = flags.pop("command")
    cfg_path = flags.pop("config", None)
    config = dict(DEFAULTS[command])
    if cfg_path:
        try:
            loaded = json.loads(Path(cfg_path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read config: {exc}", "IOError") from exc
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_INPUT, f"config is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise CliError(EXIT_INPUT, "config must be a JSON object")
        loaded = {k.replace("-", "_"): v for k, v in loaded.items() if k != "command"}
        unknown = sorted(set(loaded) - set(config))
        if unknown:
            raise CliError(EXIT_INPUT, f"unknown config keys for {command}: {', '.join(unknown)}")
        config.update(loaded)
    config.update(flags)
    if "grid" in config and config["grid"] is not None:
        try:
            config["grid"] = _grid(",".join(map(str, config["grid"])) if isinstance(config["grid"], list) else config["grid"])
        except argparse.ArgumentTypeError as exc:
            raise CliError(EXIT_INPUT, str(exc)) from exc
    return command, config


def config_digest(command, config):
    return digest(dumps({"command": command, **{k: v for k, v in config.items() if k not in PATH_KEYS}}))


# ---------------------------------------------------------------------------
# file helpers


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path, what):
    if path is None:
        raise CliError(EXIT_INPUT, f"--{what} is required")
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {what}: {exc}", "IOError") from exc


def load_manifest(path):
    text = _read(path, "manifest")
    try:
        manifest = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, f"manifest is not valid JSON: {exc}") from exc
    if manifest.get("format") != MANIFEST_FORMAT:
        raise CliError(EXIT_INPUT, f"not a {MANIFEST_FORMAT} manifest")
    return manifest, digest(text)


def surface_from_manifest(manifest, base_dir):
    """Rebuild the surface a manifest describes; profile samples are checked against their digest."""
    family = manifest["family"]
    if family in FAMILIES:
        csv_path = Path(base_dir) / manifest["profile_csv"]
        text = _read(csv_path, "profile csv")
        if digest(text) != manifest["sample_digest"]:
            raise CliError(EXIT_INPUT, f"{csv_path.name} does not match the manifest digest")
        curve = profile_from_csv(
            text, family, manifest["p"], manifest["q"], manifest["tolerances"]["local_tol"], manifest["initial"]
        )
        build = factory.generalized_rotational if family == "rotational" else factory.generalized_cylinder
        return build(curve, manifest["p"], manifest["q"])
    return factory.reference_surface(family, **manifest["params"])


# ---------------------------------------------------------------------------
# commands


def _validate_dimensions(family, p, q):
    if int(p) < 1:
        raise CliError(EXIT_INPUT, "p must be ≥ 1")
    if int(q) < 1:
        raise CliError(EXIT_INPUT, "q must be ≥ 1")
    if family in FAMILIES and p + q + 1 > MAX_DIMENSION:
        raise CliError(EXIT_INPUT, f"p + q + 1 must be ≤ {MAX_DIMENSION}")


def _reference_params(family, cfg):
    if family == "sphere":
        return {"n": cfg["n"], "r": cfg["r"]}
    if family == "round_cylinder":
        return {"p": cfg["p"], "q": cfg["q"], "r": cfg["r"]}
    if family == "plane":
        return {"n": cfg["n"]}
    if family == "ellipsoid":
        return {"semi_axes": [float(a) for a in cfg["semi_axes"]]}
    return {"R": cfg["R"], "r": cfg["r"], "n": cfg["n"]}


def slice_mesh_obj(surface, resolution=24):
    """OBJ text of the slice varying the first two parameters, projected to the first three coordinates."""
    box = grids.interior_box(surface, 0.02)
    base = grids.base_point(surface)
    a = np.linspace(box[0, 0], box[0, 1], resolution)
    b = np.linspace(box[1, 0], box[1, 1], resolution)
    lines = [f"# {surface.name}: parameters 0 and 1 varied, coordinates 0-2"]
    for x in a:
        for y in b:
            u = base.copy()
            u[0], u[1] = x, y
            lines.append("v " + " ".join(format_float(c) for c in surface(u)[:3]))
    for i in range(resolution - 1):
        for j in range(resolution - 1):
            k = i * resolution + j + 1
            lines.append(f"f {k} {k + resolution} {k + resolution + 1} {k + 1}")
    return "\n".join(lines) + "\n"


def cmd_generate(cfg, cdigest):
    family = cfg["family"]
    if family is None:
        raise CliError(EXIT_INPUT, "--family is required")
    out = Path(cfg["out"])
    manifest = {"format": MANIFEST_FORMAT, "family": family, "config_digest": cdigest}
    if family in FAMILIES:
        p, q = int(cfg["p"]), int(cfg["q"])
        _validate_dimensions(family, p, q)
        curve = integrate_profile(
            family, p, q, tuple(cfg["initial"]), cfg["s_max"], cfg["local_tol"], cfg["samples"], cfg["pole_tol"]
        )
        surface = (factory.generalized_rotational if family == "rotational" else factory.generalized_cylinder)(
            curve, p, q
        )
        csv_text = curve.to_csv()
        manifest.update(
            p=p,
            q=q,
            n=p + q + 1,
            ambient=p + q + 2,
            initial=list(curve.initial),
            s_max=float(cfg["s_max"]),
            s_range=list(curve.s_range),
            halted_early=curve.halted_early,
            n_samples=len(curve),
            profile_csv="profile.csv",
            sample_digest=digest(csv_text),
            tolerances={"local_tol": curve.local_tol, "pole_tol": curve.pole_tol, "pole_margin": factory.POLE_MARGIN},
        )
        write_atomic(out / "profile.csv", csv_text)
    else:
        params = _reference_params(family, cfg)
        surface = factory.reference_surface(family, **params)
        manifest.update(
            params=params,
            n=surface.dim_domain,
            ambient=surface.dim_ambient,
            tolerances={"pole_margin": factory.POLE_MARGIN},
        )
        if family == "round_cylinder":
            manifest.update(p=params["p"], q=params["q"])
    if cfg["obj"]:
        write_atomic(out / "slice.obj", slice_mesh_obj(surface, int(cfg["obj_res"])))
        manifest["slice_obj"] = "slice.obj"
    manifest["surface"] = surface.name
    write_atomic(out / "manifest.json", dumps(manifest) + "\n")
    return EXIT_OK


def _report_csv(reports):
    width = max(len(pt) for r in reports for pt in r.grid)
    head = ["suite", "index"] + [f"u{i}" for i in range(width)] + ["value"]
    lines = [",".join(head)]
    for r in reports:
        for i, (pt, val) in enumerate(zip(r.grid, r.values)):
            coords = [format_float(x) for x in pt] + [""] * (width - len(pt))
            lines.append(",".join([r.name, str(i)] + coords + [format_float(val)]))
    return "\n".join(lines) + "\n"


def cmd_verify(cfg, cdigest):
    manifest, mdigest = load_manifest(cfg["manifest"])
    surface = surface_from_manifest(manifest, Path(cfg["manifest"]).parent)
    tolerances = {
        key: float(cfg[f"tol_{'h' if key == 'h_condition' else key}"]) for key in suites.DEFAULT_TOLERANCES
    }
    reports, tol = suites.verify_surface(surface, cfg["grid"], int(cfg["codazzi_points"]), tolerances)
    passed = all(r.passed for r in reports)
    doc = {
        "surface": surface.name,
        "family": manifest["family"],
        "config_digest": cdigest,
        "manifest_digest": mdigest,
        "tolerances": {**tol, **manifest.get("tolerances", {})},
        "grid": list(cfg["grid"]),
        "codazzi_points": int(cfg["codazzi_points"]),
        "suites": {r.name: r.to_dict(include_values=False) for r in reports},
        "pass": passed,
    }
    out = Path(cfg["out"])
    write_atomic(out / "report.json", dumps(doc) + "\n")
    write_atomic(out / "report.csv", _report_csv(reports))
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_classify(cfg, cdigest):
    manifest, mdigest = load_manifest(cfg["manifest"])
    surface = surface_from_manifest(manifest, Path(cfg["manifest"]).parent)
    grid = suites.verification_grid(surface, cfg["grid"])

    def one(u):
        return analysis.classify_spectrum(curvature_spectrum(surface, u))

    rows = grids.grid_map(one, grid)
    patterns = sorted({tuple(r["multiplicities"]) for r in rows})
    doc = {
        "surface": surface.name,
        "config_digest": cdigest,
        "manifest_digest": mdigest,
        "eps_cluster": "1e-6 * (1 + max |k|)",
        "patterns": [list(p) for p in patterns],
        "uniform": len(patterns) == 1,
        "points": [{"u": [float(x) for x in u], **r} for u, r in zip(grid, rows)],
    }
    text = dumps(doc) + "\n"
    if cfg["out"]:
        write_atomic(cfg["out"], text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_scan_lambda(cfg, cdigest):
    manifest, mdigest = load_manifest(cfg["manifest"])
    surface = surface_from_manifest(manifest, Path(cfg["manifest"]).parent)
    grid = suites.verification_grid(surface, cfg["grid"])
    try:
        scan = analysis.null2type_lambda_scan(
            surface, grid, float(cfg["s1_floor"]), float(cfg["lambda_tol"]), float(cfg["h_lb"])
        )
    except MeanCurvatureVanishes as exc:
        raise CliError(EXIT_PRECONDITION, str(exc), "MeanCurvatureVanishes") from exc
    doc = {
        "surface": surface.name,
        "family": manifest["family"],
        "config_digest": cdigest,
        "manifest_digest": mdigest,
        "tolerances": {"lambda_tol": scan.tolerance, "s1_floor": float(cfg["s1_floor"]), "h_lb": float(cfg["h_lb"])},
        "note": "a constant lambda is necessary for null 2-type, not sufficient",
        **scan.to_dict(),
    }
    write_atomic(cfg["out"], dumps(doc) + "\n")
    return EXIT_OK


def cmd_report(cfg, cdigest):
    text = _read(cfg["input"], "input")
    try:
        doc = json.loads(text)
        suite_map = doc["suites"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CliError(EXIT_INPUT, f"not a verification report: {exc}") from exc
    lines = [f"surface: {doc.get('surface')}", f"config digest: {doc.get('config_digest')}", ""]
    lines.append(f"{'suite':<22} {'max':>12} {'tolerance':>10}  result")
    for name in sorted(suite_map):
        r = suite_map[name]
        note = r.get("details", {}).get("note") or r.get("details", {}).get("error") or ""
        mx = r["max"] if isinstance(r["max"], str) else f"{r['max']:.3e}"
        verdict = "PASS" if r["pass"] else "FAIL"
        lines.append(f"{name:<22} {mx:>12} {r['tolerance']:>10.1e}  {verdict}  {note}".rstrip())
    lines.append("")
    lines.append("overall: " + ("PASS" if doc.get("pass") else "FAIL"))
    out = "\n".join(lines) + "\n"
    if cfg["out"]:
        write_atomic(cfg["out"], out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "scan-lambda": cmd_scan_lambda,
    "report": cmd_report,
}


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"error": {"exit_code": code, "message": message, "type": kind}}, ensure_ascii=False, sort_keys=True) + "\n")
    return code


def main(argv=None):
    try:
        command, cfg = resolve_config(sys.argv[1:] if argv is None else argv)
        return COMMANDS[command](cfg, config_digest(command, cfg))
    except CliError as exc:
        return _fail(exc.code, exc.kind, str(exc))
    except MeanCurvatureVanishes as exc:
        return _fail(EXIT_PRECONDITION, type(exc).__name__, str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, type(exc).__name__, str(exc))
    except (BclabError, ValueError, TypeError, KeyError) as exc:
        return _fail(EXIT_INPUT, type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
