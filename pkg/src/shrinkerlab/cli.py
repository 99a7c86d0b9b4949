"""Command-line front end.

Every subcommand reads an optional flat JSON config (``--config``), applies
flag overrides on top, writes a JSON summary plus CSV/OFF detail into the
output directory and exits 0 when all checks pass, 1 when a check fails and
2 on a usage error.
"""

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import acceptance
from .canonical import CANONICAL_KINDS, make_canonical
from .exceptions import ShrinkerLabError
from .flow import FlowState, mcf_step, rescaled_trajectory_check, stable_timestep
from .functional import F_tail_bound, F_value, conformal_report, conformal_scalar_curvature, fd_variation_check, first_variation
from .geometry import compute_geometry
from .mesh import genus, read_off, write_field_csv, write_off
from .profile import circle_profile, line_profile, ray_profile, revolve
from .shrinkers import residual, shoot_closed_profile
from .stability import (
    certificate_threshold,
    instability_certificate,
    spectrum,
)

COMMANDS = (
    "residual", "functional", "variation-check", "conformal", "spectrum",
    "certify", "flow", "shoot-torus", "report-all",
)

# key -> (type, default). Only these keys are accepted in a config file.
PARAMS = {
    "surface": (str, "sphere"),
    "resolution": (int, 3),
    "output_dir": (str, None),
    "tolerances": (dict, {}),
    "radius": (float, 3.0),
    "model": (str, "analytic"),
    "t0": (float, -1.0),
    "t1": (float, -0.5),
    "steps": (int, None),
    "scheme": (str, "explicit"),
    "snapshot_every": (int, 0),
    "k": (int, None),
    "count": (int, 4),
    "Z": (float, 12.0),
    "n": (int, 2),
    "r_start_min": (float, 0.3),
    "r_start_max": (float, 1.2),
    "tol": (float, 1e-8),
    "step": (float, 1e-3),
    "angular_resolution": (int, 256),
    "fields": (int, 5),
    "seed": (int, 0),
}

# command -> default tolerances (names are the only ones --tolerance accepts)
TOLERANCES = {
    "residual": {"norm_inf": None},  # filled per surface
    "functional": {"F_rel": 1e-2},
    "variation-check": {"fd_rel": 1e-3, "critical": 1e-3},
    "conformal": {"sign_change": 1e-9, "distance": 1e-6},
    "spectrum": {"head": 1e-2},
    "certify": {"form_excess": 1e-2},
    "flow": {"distance": 1e-2},
    "shoot-torus": {"residual": 1e-2},
    "report-all": {},
}

RESIDUAL_DEFAULT = {"sphere": 5e-3, "plane": 1e-6, "cylinder": 5e-3}
F_REFERENCE = acceptance.F_REFERENCE
SPECTRUM_REFERENCE = {
    ("sphere", 0): [-1.0, -0.5, 0.5, 2.0],
    ("sphere", 1): [-0.5, 0.5, 2.0, 4.0],
    ("cylinder", 0): [-1.0, -0.5, 0.0, 0.5],
    ("cylinder", 1): [-0.5, 0.0, 0.5, 1.0],
    ("plane", 0): [-0.5, 0.5, 1.5, 2.5],
    ("plane", 1): [0.0, 1.0, 2.0, 3.0],
}


class UsageError(Exception):
    pass


# -- config -------------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.__dict__["params"][name]
        except KeyError:
            raise AttributeError(name) from None


def _coerce(key, value):
    typ = PARAMS[key][0]
    if value is None:
        return None
    if typ is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if typ is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if typ is str and isinstance(value, str):
        return value
    if typ is dict and isinstance(value, dict):
        return value
    raise UsageError(f"config key {key!r} expects {typ.__name__}, got {type(value).__name__}")


def parse_config(path):
    """Strictly parse a flat JSON config into a dict of known keys."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError("config must be a JSON object")
    out = {}
    for key, value in raw.items():
        if key == "command":
            if value not in COMMANDS:
                raise UsageError(f"unknown command {value!r}")
            out[key] = value
        elif key in PARAMS:
            out[key] = _coerce(key, value)
        else:
            raise UsageError(f"unknown config key {key!r}")
    return out


def _parse_tolerance(text):
    name, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name!r} is not a number") from None


def build_config(args):
    """Defaults, then config file, then flags; validate tolerances."""
    params = {k: v[1] for k, v in PARAMS.items()}
    params["tolerances"] = {}
    file_cfg = parse_config(args.config) if getattr(args, "config", None) else {}
    command = getattr(args, "command", None) or file_cfg.pop("command", None)
    file_cfg.pop("command", None)
    if command is None:
        raise UsageError("no command given (subcommand or 'command' in the config)")
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}")
    params.update(file_cfg)
    for key in PARAMS:
        if key in ("tolerances",):
            continue
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    tols = dict(params.get("tolerances") or {})
    for name, val in getattr(args, "tolerance", None) or []:
        tols[name] = val
    allowed = TOLERANCES[command]
    for name, val in tols.items():
        if name not in allowed:
            known = ", ".join(sorted(allowed)) or "none"
            raise UsageError(f"unknown tolerance {name!r} for {command} (known: {known})")
        if not (isinstance(val, (int, float)) and not isinstance(val, bool) and val > 0 and math.isfinite(val)):
            raise UsageError(f"tolerance {name!r} must be a positive number")
    params["tolerances"] = {k: float(v) for k, v in tols.items()}
    if params.get("output_dir") is None:
        params["output_dir"] = os.environ.get("OUTPUT_DIR", "shrinkerlab-out")
    if params["resolution"] is not None and params["resolution"] < 1:
        raise UsageError("resolution must be >= 1")
    return RunConfig(command, params)


def _tol(cfg, name, default=None):
    return cfg.tolerances.get(name, TOLERANCES[cfg.command].get(name) if default is None else default)


# -- output helpers -----------------------------------------------------------


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_clean(obj), fh, indent=2, allow_nan=False)
        fh.write("\n")
    return path


def write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return Path(path)


class Report:
    """Collects records and checks for one command."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.records = []
        self.failures = []

    def add(self, quantity, value, tolerance=None, mesh_id=None, resolution=None):
        self.records.append(acceptance.record(quantity, value, tolerance, mesh_id, resolution))

    def check(self, ok, quantity, value, tolerance, mesh_id=None, resolution=None, why=None):
        self.add(quantity, value, tolerance, mesh_id, resolution)
        if not ok:
            self.failures.append(why or f"{quantity}={value!r} (tolerance {tolerance!r})")

    def finish(self, extra=None):
        out = Path(self.cfg.output_dir)
        body = {
            "command": self.cfg.command,
            "config": {k: v for k, v in sorted(self.cfg.params.items()) if k != "output_dir"},
            "passed": not self.failures,
            "failures": self.failures,
            "records": self.records,
        }
        if extra:
            body.update(extra)
        path = write_json(out / f"{self.cfg.command}.json", body)
        print(f"{self.cfg.command}: {'PASS' if not self.failures else 'FAIL'} -> {path}")
        for f in self.failures:
            print(f"  failed: {f}", file=sys.stderr)
        return 0 if not self.failures else 1


def load_surface(cfg):
    """Mesh, mesh id and resolution for ``cfg.surface``."""
    s = cfg.surface
    if s in CANONICAL_KINDS:
        return make_canonical(s, cfg.resolution), s, cfg.resolution
    p = Path(s)
    if p.suffix.lower() == ".off":
        if not p.exists():
            raise UsageError(f"mesh file {s} not found")
        return read_off(p), p.stem, None
    raise UsageError(f"surface must be one of {CANONICAL_KINDS} or an .off path, got {s!r}")


# -- commands -----------------------------------------------------------------


def cmd_residual(cfg):
    rep = Report(cfg)
    mesh, mid, res = load_surface(cfg)
    g = compute_geometry(mesh)
    r = residual(mesh, g)
    tol = _tol(cfg, "norm_inf", RESIDUAL_DEFAULT.get(mid, 1e-2))
    table = []
    if mid in CANONICAL_KINDS:
        for lvl in range(max(1, res - 2), res + 1):
            m = mesh if lvl == res else make_canonical(mid, lvl)
            rr = r if lvl == res else residual(m)
            table.append({"resolution": lvl, "n_vertices": m.n_vertices,
                          "norm_inf": rr.norm_inf, "norm_l2_weighted": rr.norm_l2_weighted})
    rep.check(r.norm_inf < tol, "residual_norm_inf", r.norm_inf, tol, mid, res)
    rep.add("residual_norm_l2_weighted", r.norm_l2_weighted, None, mid, res)
    write_field_csv(mesh, r.pointwise, Path(cfg.output_dir) / "residual.csv")
    return rep.finish({"convergence": table})


def cmd_functional(cfg):
    rep = Report(cfg)
    mesh, mid, res = load_surface(cfg)
    g = compute_geometry(mesh)
    val = F_value(mesh, g)
    rep.add("F", val, None, mid, res)
    rep.add("F_truncation_tail_bound", F_tail_bound(mesh), None, mid, res)
    if mid in F_REFERENCE:
        ref = F_REFERENCE[mid]
        err = abs(val - ref) / ref
        tol = _tol(cfg, "F_rel")
        rep.add("F_reference", ref, None, mid, res)
        rep.check(err < tol, "F_rel_error", err, tol, mid, res)
    return rep.finish()


def cmd_variation_check(cfg):
    rep = Report(cfg)
    mesh, mid, res = load_surface(cfg)
    g = compute_geometry(mesh)
    rng = np.random.default_rng(cfg.seed)
    tol_fd, tol_crit = _tol(cfg, "fd_rel"), _tol(cfg, "critical")
    is_shrinker = residual(mesh, g).norm_inf < 5e-2
    rows = []
    for i in range(cfg.fields):
        f = acceptance.bump_variation(mesh, rng)
        chk = fd_variation_check(mesh, f, geom=g)
        crit = abs(chk.analytic) / float(np.max(np.abs(f)))
        rows.append([i, chk.step, chk.fd, chk.analytic, chk.relative_error, crit, chk.total_area_rate_error])
        rep.check(chk.relative_error < tol_fd, f"fd_vs_analytic_rel[{i}]", chk.relative_error, tol_fd, mid, res)
        if is_shrinker:
            rep.check(crit < tol_crit, f"analytic_over_fmax[{i}]", crit, tol_crit, mid, res)
    rep.add("linearity_defect", _linearity_defect(mesh, g, rng), None, mid, res)
    write_rows(Path(cfg.output_dir) / "variation-check.csv",
               ["field", "step", "fd", "analytic", "relative_error", "analytic_over_fmax", "total_area_rate_error"], rows)
    return rep.finish()


def _linearity_defect(mesh, g, rng):
    f1, f2 = acceptance.bump_variation(mesh, rng), acceptance.bump_variation(mesh, rng)
    a, b = rng.normal(size=2)
    lhs = first_variation(mesh, g, a * f1 + b * f2)
    return abs(lhs - a * first_variation(mesh, g, f1) - b * first_variation(mesh, g, f2))


def cmd_conformal(cfg):
    rep = Report(cfg)
    try:
        c = conformal_report(cfg.n)
    except ShrinkerLabError as exc:
        raise UsageError(str(exc)) from exc
    n = c.n
    rep.add("scalar_curvature_at_origin", float(c.scalar_curvature_at(0.0)), None)
    exact_r = math.sqrt(4 * n * (n + 1) / (n - 1))
    exact_d = math.sqrt(n * math.pi)
    rep.check(abs(c.sign_change_radius - exact_r) < _tol(cfg, "sign_change"), "sign_change_radius",
              c.sign_change_radius, _tol(cfg, "sign_change"))
    rep.check(abs(c.distance_to_infinity - exact_d) < _tol(cfg, "distance"), "distance_to_infinity",
              c.distance_to_infinity, _tol(cfg, "distance"))
    r = np.linspace(0.0, 2 * c.sign_change_radius, 201)
    write_rows(Path(cfg.output_dir) / "conformal.csv", ["radius", "scalar_curvature"],
               zip(r, conformal_scalar_curvature(r, n)))
    return rep.finish()


def _profile_for(cfg):
    s = cfg.surface
    if s == "sphere":
        return circle_profile(), None
    if s == "cylinder":
        return line_profile(half_length=cfg.Z), cfg.Z
    if s == "plane":
        return ray_profile(length=cfg.Z), cfg.Z
    if s == "torus":
        res = shoot_closed_profile((cfg.r_start_min, cfg.r_start_max), tol=cfg.tol, step=cfg.step,
                                   angular_resolution=cfg.angular_resolution)
        return res.profile, None
    raise UsageError("spectrum needs surface sphere, cylinder, plane or torus")


def cmd_spectrum(cfg):
    rep = Report(cfg)
    profile, Z = _profile_for(cfg)
    modes = (0, 1) if cfg.k is None else (cfg.k,)
    tol = _tol(cfg, "head")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = {}
    for k in modes:
        sr = spectrum(profile, k=k, count=cfg.count, Z=Z)
        results[k] = sr
        rep.add(f"eigenvalues_k{k}", sr.eigenvalues, None, cfg.surface)
        rep.add(f"orthonormality_residual_k{k}", sr.orthonormality_residual, 1e-8, cfg.surface)
        ref = SPECTRUM_REFERENCE.get((cfg.surface, k))
        if ref is not None:
            m = min(len(ref), len(sr.eigenvalues))
            err = float(np.max(np.abs(sr.eigenvalues[:m] - np.array(ref[:m]))))
            rep.check(err < tol, f"head_error_k{k}", err, tol, cfg.surface)
        header = ["s", "r", "z"] + [f"phi_{j}" for j in range(len(sr.eigenvalues))]
        write_rows(out / f"spectrum_k{k}.csv", header,
                   (list(node) + list(col) for node, col in zip(sr.nodes, sr.eigenfunctions.T)))
    return rep.finish({"spectra": {str(k): r.to_dict() for k, r in results.items()}})


def cmd_certify(cfg):
    rep = Report(cfg)
    R = cfg.radius
    if not R > 0:
        raise UsageError("radius must be positive")
    s = cfg.surface
    analytic = s in CANONICAL_KINDS and cfg.model == "analytic"
    if cfg.model not in ("analytic", "mesh"):
        raise UsageError("model must be 'analytic' or 'mesh'")
    if analytic:
        c = instability_certificate(s, R)
        mid, res = s, None
        rep.add("threshold_radius", certificate_threshold(s, lo=0.5, hi=6.0, tol=1e-10), None, s)
    else:
        mesh, mid, res = load_surface(cfg)
        c = instability_certificate("mesh", R, mesh=mesh, geom=compute_geometry(mesh))
    for key, val in c.to_dict().items():
        if key not in ("model", "R", "bound", "form_value"):
            rep.add(key, val, None, mid, res)
    rep.check(c.bound < 0, "bound", c.bound, None, mid, res, why=f"bound {c.bound:.4g} is not negative")
    rep.check(c.form_value < 0, "form_value", c.form_value, None, mid, res,
              why=f"form value {c.form_value:.4g} is not negative")
    tol = _tol(cfg, "form_excess")
    excess = c.form_value - c.bound
    rep.check(excess <= tol, "form_minus_bound", excess, tol, mid, res)
    return rep.finish({"certificate": c.to_dict()})


def cmd_flow(cfg):
    rep = Report(cfg)
    sigma, mid, res = load_surface(cfg)
    t0, t1 = cfg.t0, cfg.t1
    if not (-1.0 <= t0 < t1 < 0.0):
        raise UsageError("need -1 <= t0 < t1 < 0")
    start = sigma.scaled(math.sqrt(-t0))
    steps = cfg.steps
    if steps is None:
        # half the explicit bound at the final scale
        dt = 0.5 * stable_timestep(sigma.scaled(math.sqrt(-t1)))
        steps = int(math.ceil((t1 - t0) / dt))
    out = Path(cfg.output_dir) / "flow"
    out.mkdir(parents=True, exist_ok=True)
    every = cfg.snapshot_every or steps
    manifest = []
    state = FlowState(start, t0)
    dt = (t1 - t0) / steps

    def snap(st):
        name = f"step_{st.step_count:05d}.off"
        write_off(st.mesh, out / name)
        back = st.mesh.scaled(1.0 / math.sqrt(-st.t))
        manifest.append({"t": st.t, "step": st.step_count, "file": name,
                         "residuals": {"rescaled_norm_inf": residual(back).norm_inf}})

    snap(state)
    for i in range(steps):
        state = mcf_step(state, dt, scheme=cfg.scheme)
        if i == steps - 1:
            state = FlowState(state.mesh, t1, state.step_count)
        if state.step_count % every == 0 or i == steps - 1:
            snap(state)
    d = rescaled_trajectory_check(sigma, t0, t1, steps, scheme=cfg.scheme)
    tol = _tol(cfg, "distance")
    rep.add("steps", steps, None, mid, res)
    rep.check(d < tol, "hausdorff_to_rescaled", d, tol, mid, res)
    if mid == "sphere":
        radius = float(np.mean(np.linalg.norm(state.mesh.vertices, axis=1)))
        rep.add("mean_radius", radius, None, mid, res)
        rep.add("exact_radius", 2.0 * math.sqrt(-t1), None, mid, res)
    write_json(out / "manifest.json", {"snapshots": manifest})
    return rep.finish()


def cmd_shoot_torus(cfg):
    rep = Report(cfg)
    res = shoot_closed_profile((cfg.r_start_min, cfg.r_start_max), tol=cfg.tol, step=cfg.step,
                               angular_resolution=cfg.angular_resolution)
    mesh = revolve(res.profile, cfg.angular_resolution)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    res.profile.to_csv(out / "torus_profile.csv")
    write_off(mesh, out / "torus.off")
    rn = residual(mesh).norm_inf
    g = genus(mesh)
    ar = cfg.angular_resolution
    rep.add("r_start", res.r_start, None, "torus", ar)
    rep.add("r_outer", res.r_outer, None, "torus", ar)
    rep.add("profile_length", res.length, None, "torus", ar)
    rep.check(res.closure_error < cfg.tol, "closure_error", res.closure_error, cfg.tol, "torus", ar)
    rep.check(g == 1, "genus", g, None, "torus", ar, why=f"genus {g} != 1")
    tol = _tol(cfg, "residual")
    rep.check(rn < tol, "residual_norm_inf", rn, tol, "torus", ar)
    return rep.finish()


def cmd_report_all(cfg):
    rep = Report(cfg)
    results = acceptance.run_all()
    for c in results:
        print(c.line())
        if not c.passed:
            rep.failures.append(f"criterion {c.number}: " + "; ".join(c.failures))
    rep.records = [r for c in results for r in c.records]
    return rep.finish({
        "criteria": [c.to_dict() for c in results],
        "criterion_11": acceptance.DETERMINISM_NOTE,
    })


HANDLERS = {
    "residual": cmd_residual,
    "functional": cmd_functional,
    "variation-check": cmd_variation_check,
    "conformal": cmd_conformal,
    "spectrum": cmd_spectrum,
    "certify": cmd_certify,
    "flow": cmd_flow,
    "shoot-torus": cmd_shoot_torus,
    "report-all": cmd_report_all,
}

HELP = {
    "residual": "shrinker residual H - <x,n>/2 with a convergence table",
    "functional": "Gaussian area F with its truncation tail bound",
    "variation-check": "first variation of F against central differences",
    "conformal": "conformal scalar curvature sign change and distance to infinity",
    "spectrum": "lowest eigenvalues of -L on a profile reduction",
    "certify": "cut-off translation instability certificate at radius R",
    "flow": "mean curvature flow against the self-similar solution",
    "shoot-torus": "shooting search for a closed genus-1 shrinker profile",
    "report-all": "run every acceptance criterion into one report",
}


# -- argument parsing ---------------------------------------------------------


def _common(p):
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="flat JSON config; flags override its values")
    p.add_argument("--surface", default=S, help="plane, sphere, cylinder (or torus for spectrum) or an .off file")
    p.add_argument("--resolution", type=int, default=S, help="canonical mesh refinement level (>= 1)")
    p.add_argument("--output-dir", dest="output_dir", default=S,
                   help="report directory (default: $OUTPUT_DIR or ./shrinkerlab-out)")
    p.add_argument("--tolerance", type=_parse_tolerance, action="append", default=S, metavar="NAME=VALUE",
                   help="override a named tolerance; repeatable")


def build_parser():
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="shrinkerlab", description=__doc__.splitlines()[0])
    _common(parser)
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name in COMMANDS:
        tol_names = ", ".join(sorted(TOLERANCES[name])) or "none"
        p = sub.add_parser(name, help=HELP[name], description=f"{HELP[name]}. Tolerances: {tol_names}.")
        _common(p)
        if name == "certify":
            p.add_argument("--radius", type=float, default=S)
            p.add_argument("--model", choices=("analytic", "mesh"), default=S)
        if name == "flow":
            p.add_argument("--t0", type=float, default=S)
            p.add_argument("--t1", type=float, default=S)
            p.add_argument("--steps", type=int, default=S)
            p.add_argument("--scheme", choices=("explicit", "semi-implicit"), default=S)
            p.add_argument("--snapshot-every", dest="snapshot_every", type=int, default=S)
        if name == "spectrum":
            p.add_argument("--k", type=int, default=S, help="angular mode (default: 0 and 1)")
            p.add_argument("--count", type=int, default=S)
            p.add_argument("--Z", type=float, default=S, help="truncation radius for open profiles")
        if name in ("spectrum", "shoot-torus"):
            p.add_argument("--r-start-min", dest="r_start_min", type=float, default=S)
            p.add_argument("--r-start-max", dest="r_start_max", type=float, default=S)
            p.add_argument("--tol", type=float, default=S)
            p.add_argument("--step", type=float, default=S)
            p.add_argument("--angular-resolution", dest="angular_resolution", type=int, default=S)
        if name == "conformal":
            p.add_argument("--n", type=int, default=S)
        if name == "variation-check":
            p.add_argument("--fields", type=int, default=S)
            p.add_argument("--seed", type=int, default=S)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = build_config(args)
        try:
            Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise UsageError(f"cannot create output directory {cfg.output_dir}: {exc}") from exc
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ShrinkerLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
