"""Command-line front end.

    lorentzw <eval|curvature|verify-pde|canonicalize|catalog> [flags]

Surfaces come from ``--config FILE`` (JSON) or ``--catalog NAME``. Exit codes:
0 success, 1 verification failure, 2 configuration error, 3 domain error,
4 everything masked, 5 reparametrization ODE failure.
"""

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import catalog
from .canonical import reparametrize_to_canonical, verify_canonical
from .config import SurfaceConfig
from .curvature import (
    SurfaceClass,
    classify,
    curvatures_canonical_closed_form,
    curvatures_via_frame,
)
from .errors import (
    ConfigError,
    ConstructionError,
    DomainError,
    ExprSyntaxError,
    LorentzwError,
    MaskError,
    PreconditionError,
    QuadratureError,
    SingularPointError,
    StiffnessError,
)
from .pde import fields_from_surface, natural_system_residual

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DOMAIN, EXIT_MASK, EXIT_ODE = range(6)

EVAL_HEADER = ["u", "v", "x1", "x2", "x3", "x4", "E", "sign", "mask"]


class CommandError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _workers():
    raw = os.environ.get("LORENTZW_THREADS")
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        return max(1, int(raw))
    except ValueError:
        raise CommandError(EXIT_CONFIG, f"LORENTZW_THREADS must be an integer, got {raw!r}") from None


def _load_config(args):
    if args.catalog:
        try:
            return SurfaceConfig.from_dict(catalog.get(args.catalog).config())
        except KeyError as exc:
            raise CommandError(EXIT_CONFIG, str(exc.args[0])) from None
    return SurfaceConfig.load(args.config)


def _surface(config, check=True):
    try:
        return config.build_surface(check=check)
    except (ExprSyntaxError, ConstructionError) as exc:
        raise CommandError(EXIT_CONFIG, f"invalid surface definition: {exc}") from None


def _grid(config):
    u, v = config.axes()
    U, V = np.meshgrid(u, v, indexing="ij")
    return U.ravel(), V.ravel()


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w", newline="")


def _fmt(x):
    return "" if x is None or (isinstance(x, float) and not np.isfinite(x)) else repr(float(x))


# -- eval -------------------------------------------------------------------

def _obj_text(U, V, points, mask, shape, project):
    lines = ["# quad mesh of a coordinate projection", f"# axes {','.join(str(a + 1) for a in project)}"]
    for p in points:
        lines.append("v " + " ".join(repr(float(p[a])) for a in project))
    nu, nv = shape
    index = np.arange(nu * nv).reshape(nu, nv) + 1
    m = mask.reshape(nu, nv)
    for i in range(nu - 1):
        for j in range(nv - 1):
            if m[i, j] or m[i + 1, j] or m[i + 1, j + 1] or m[i, j + 1]:
                continue
            lines.append(f"f {index[i, j]} {index[i + 1, j]} {index[i + 1, j + 1]} {index[i, j + 1]}")
    return "\n".join(lines) + "\n"


def cmd_eval(args):
    config = _load_config(args)
    S = _surface(config)
    U, V = _grid(config)
    points = S.eval_point(U, V, quad_tol=config.tol("quad"))
    E = np.asarray(S.first_form(U, V)[0])
    mask = S.singular_mask(U, V, config.tol("singular"))
    if args.format == "obj":
        project = [int(a) - 1 for a in args.project.split(",")]
        if len(project) != 3 or any(a not in range(4) for a in project) or len(set(project)) != 3:
            raise CommandError(EXIT_CONFIG, f"--project needs three distinct axes among 1..4, got {args.project}")
        shape = tuple(len(a) for a in config.axes())
        text = _obj_text(U, V, points, mask, shape, project)
    elif args.format == "json":
        rows = [dict(zip(EVAL_HEADER, [u, v, *map(float, p), float(e), int(np.sign(e)), bool(m)]))
                for u, v, p, e, m in zip(U, V, points, E, mask)]
        text = json.dumps({"rows": rows}, indent=1) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(EVAL_HEADER)
        for u, v, p, e, m in zip(U, V, points, E, mask):
            writer.writerow([_fmt(u), _fmt(v), *map(_fmt, p), _fmt(e), int(np.sign(e)), int(m)])
        text = buf.getvalue()
    out = _open_out(args.out)
    try:
        out.write(text)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# -- curvature ----------------------------------------------------------------

def _curvature_node(S, u, v, method, config):
    row = {"u": float(u), "v": float(v), "class": None, "sign": None, "mask": 0,
           "K_closed": None, "kappa_closed": None, "K_frame": None, "kappa_frame": None, "deficit": None}
    if S.singular_mask(u, v, config.tol("singular")):
        row["mask"] = 1
        return row
    row["sign"] = int(np.sign(S.first_form(u, v)[0]))
    cls = classify(S, u, v, config.tol("classify"))
    row["class"] = str(cls)
    if method in ("closed", "both") and S.general_form:
        try:
            c = curvatures_canonical_closed_form(S, u, v, verify=True, tol=config.tol("canonical"))
            row.update(K_closed=c.K, kappa_closed=c.kappa, deficit=c.deficit)
        except LorentzwError as exc:
            row["closed_error"] = type(exc).__name__
    if method in ("frame", "both") and cls not in (SurfaceClass.PLANE, SurfaceClass.ONE_DIM_NORMAL):
        try:
            sample, _ = curvatures_via_frame(S, u, v, config.tol("rank"))
            row.update(K_frame=sample.K, kappa_frame=sample.kappa)
            if row["deficit"] is None:
                row["deficit"] = sample.deficit
        except LorentzwError as exc:
            row["frame_error"] = type(exc).__name__
    return row


def cmd_curvature(args):
    config = _load_config(args)
    S = _surface(config)
    U, V = _grid(config)
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        rows = list(pool.map(lambda uv: _curvature_node(S, uv[0], uv[1], args.method, config), zip(U, V)))
    summary = {"nodes": len(rows), "masked": sum(r["mask"] for r in rows),
               "classes": {}}
    for r in rows:
        if r["class"]:
            summary["classes"][r["class"]] = summary["classes"].get(r["class"], 0) + 1
    if args.method == "both":
        dk, dkappa = [], []
        for r in rows:
            if r["K_closed"] is not None and r["K_frame"] is not None:
                scale = max(1.0, abs(r["K_closed"]))
                dk.append(abs(r["K_closed"] - r["K_frame"]) / scale)
                dkappa.append(abs(abs(r["kappa_closed"]) - abs(r["kappa_frame"])) / max(1.0, abs(r["kappa_closed"])))
        summary["compared"] = len(dk)
        summary["max_K_discrepancy"] = max(dk) if dk else None
        summary["max_abs_kappa_discrepancy"] = max(dkappa) if dkappa else None
    columns = ["u", "v", "class", "sign", "mask", "K_closed", "kappa_closed", "K_frame", "kappa_frame", "deficit"]
    out = _open_out(args.out)
    try:
        if args.format == "json":
            json.dump({"nodes": rows, "summary": summary}, out, indent=1)
            out.write("\n")
        else:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(columns)
            for r in rows:
                writer.writerow([r[c] if c in ("class", "sign", "mask") and r[c] is not None
                                 else ("" if r[c] is None else _fmt(r[c])) for c in columns])
            print(json.dumps(summary), file=sys.stderr)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.method == "both" and summary.get("max_K_discrepancy") is not None:
        if summary["max_K_discrepancy"] > args.tol or summary["max_abs_kappa_discrepancy"] > args.tol:
            return EXIT_FAIL
    return EXIT_OK


# -- verify-pde -------------------------------------------------------------

def _axis(lo, hi, h):
    n = int(round((hi - lo) / h))
    if n < 2:
        raise CommandError(EXIT_MASK, f"region [{lo}, {hi}] holds fewer than three nodes at h={h}")
    return np.linspace(lo, lo + n * h, n + 1)


def _compute_fields(config, u, v):
    """K, kappa and sign(E) fields for the configured surface (replaceable in tests)."""
    S = _surface(config)
    if not S.general_form:
        raise CommandError(EXIT_CONFIG, "verify-pde needs two type-2 curves")
    return fields_from_surface(S, u, v)


def cmd_verify_pde(args):
    config = _load_config(args)
    region = config.pde_region or {k: config.grid[k][:2] for k in ("u", "v")}
    u = _axis(*region["u"], args.h)
    v = _axis(*region["v"], args.h)
    eps = args.epsilon if args.epsilon == "auto" else int(args.epsilon)
    try:
        fields = _compute_fields(config, u, v)
        report = natural_system_residual(fields.K, fields.kappa, eps, fields.orientation)
    except (MaskError, ConstructionError) as exc:
        raise CommandError(EXIT_MASK, str(exc)) from None
    doc = report.to_dict()
    doc["nodes_evaluated"] = doc.pop("nodes")
    doc["tol"] = args.tol
    doc["passed"] = bool(report.max_r1 < args.tol and report.max_r2 < args.tol)
    out = _open_out(args.out)
    try:
        json.dump(doc, out, indent=1)
        out.write("\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK if doc["passed"] else EXIT_FAIL


# -- canonicalize -------------------------------------------------------------

def cmd_canonicalize(args):
    config = _load_config(args)
    S = _surface(config, check=False)
    if not S.general_form or any(c.__class__.__name__ != "NullCurve" for c in (S.beta, S.theta)):
        raise CommandError(EXIT_CONFIG, "canonicalize needs expression-based type-2 curves")
    solution, canon = reparametrize_to_canonical(
        S, z0=args.z0, t0=args.t0, s0=args.s0, step=args.step, span=args.span,
        s_p=args.s_p, s_q=args.s_q, tol=config.tol("ode"),
    )
    lo, hi = solution.interval
    a = np.linspace(lo, hi, 13)[1:-1]
    A, B = np.meshgrid(a, a, indexing="ij")
    ubar, vbar = (A + B) / 2, (A - B) / 2
    check = verify_canonical(canon, ubar, vbar, tol=config.tol("canonical"))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    knots_path = out_dir / "reparam.csv"
    config_path = out_dir / "canonical.json"
    with open(knots_path, "w", newline="") as fh:
        solution.to_csv(fh)
    span = hi - lo
    new_doc = {
        "name": f"{config.name or 'surface'}_canonical",
        "beta": canon.beta.to_dict(),
        "theta": canon.theta.to_dict(),
        "grid": {"u": [lo + 0.25 * span, hi - 0.25 * span, 11], "v": [-0.25 * span, 0.25 * span, 11]},
        "pde_region": {"u": [solution.z0 - 0.05 * span, solution.z0 + 0.05 * span], "v": [-0.05 * span, 0.05 * span]},
    }
    SurfaceConfig.from_dict(new_doc)
    with open(config_path, "w") as fh:
        json.dump(new_doc, fh, indent=1)
        fh.write("\n")
    report = {
        "knots": str(knots_path), "config": str(config_path),
        "z_interval": [lo, hi], "s_p": solution.s_p, "s_q": solution.s_q,
        "ode_residual_knots": solution.ode_residual("knots"),
        "verify_canonical": check.to_dict(),
    }
    json.dump(report, sys.stdout, indent=1)
    sys.stdout.write("\n")
    return EXIT_OK if check.passed else EXIT_FAIL


# -- catalog ---------------------------------------------------------------

def cmd_catalog(args):
    if args.name:
        try:
            entry = catalog.get(args.name)
        except KeyError as exc:
            raise CommandError(EXIT_CONFIG, str(exc.args[0])) from None
        json.dump(entry.config(), sys.stdout, indent=1)
        sys.stdout.write("\n")
    else:
        for name in catalog.names():
            print(f"{name}\t{catalog.get(name).description}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------

def _add_source(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="surface configuration JSON file")
    src.add_argument("--catalog", help="built-in surface name (see 'lorentzw catalog')")


def build_parser():
    parser = argparse.ArgumentParser(prog="lorentzw", description="Minimal Lorentzian surfaces in R^4_2.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="positions, E and sign(E) on the configured grid")
    _add_source(p)
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=["csv", "json", "obj"], default="csv")
    p.add_argument("--project", default="1,2,3", help="three coordinates kept in OBJ output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("curvature", help="K, kappa, K^2-kappa^2 and classification per node")
    _add_source(p)
    p.add_argument("--method", choices=["closed", "frame", "both"], default="both")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.add_argument("--tol", type=float, default=1e-7, help="relative agreement required with --method both")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("verify-pde", help="finite-difference residuals of the natural system")
    _add_source(p)
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--epsilon", choices=["auto", "+1", "-1", "1"], default="auto")
    p.add_argument("--tol", type=float, default=1e-2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_pde)

    p = sub.add_parser("canonicalize", help="reparametrize to canonical parameters")
    _add_source(p)
    p.add_argument("--z0", type=float)
    p.add_argument("--t0", type=float)
    p.add_argument("--s0", type=float)
    p.add_argument("--span", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--s-p", dest="s_p", type=int, choices=[-1, 1], default=1)
    p.add_argument("--s-q", dest="s_q", type=int, choices=[-1, 1], default=1)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("catalog", help="list built-in surfaces or print one as a configuration")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"lorentzw: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, ExprSyntaxError) as exc:
        print(f"lorentzw: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PreconditionError, StiffnessError) as exc:
        print(f"lorentzw: reparametrization failed: {exc}", file=sys.stderr)
        return EXIT_ODE
    except MaskError as exc:
        print(f"lorentzw: {exc}", file=sys.stderr)
        return EXIT_MASK
    except (DomainError, QuadratureError, SingularPointError) as exc:
        print(f"lorentzw: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConstructionError as exc:
        print(f"lorentzw: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
