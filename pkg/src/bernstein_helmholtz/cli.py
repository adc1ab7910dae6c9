"""Command-line front end.

Exit codes: 0 all assertions pass, 1 a numeric assertion failed, 2 usage or
configuration error, 3 internal numeric failure.

Every command accepts ``--config FILE`` with a JSON object whose keys are
the long option names (``-`` or ``_``); explicit flags override it.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import bernstein as bn
from . import io as bio
from .errors import (
    BudgetExceeded,
    BernsteinHelmholtzError,
    NearZeroSymbol,
    NoUnitEigenvalue,
    NonIntegrableMeasure,
)
from .multiplier import (
    helmholtz_residual,
    omega_ratio_sweep,
    on_sphere_modes,
    superpose_modes,
)
from .sphere import PointMasses, bstar_norm, herglotz, make_quadrature
from .subordination import (
    MatrixGenerator,
    eigen_transfer_check,
    phillips_apply,
    random_psd_with_unit_eigenvalue,
    read_matrix,
    spectral_apply,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

COMMANDS = ("bernstein-eval", "verify-helmholtz", "synth-herglotz", "bstar", "subordinate", "catalogue")

# per-command defaults; anything not listed defaults to None
DEFAULTS: dict[str, dict[str, Any]] = {
    "bernstein-eval": {"fn": None, "lambdas": "1"},
    "verify-helmholtz": {"fn": None, "d": 2, "n": 128, "box": 2 * math.pi, "suite": "on-sphere",
                         "lambdas": "2,4,5,9", "tol": None, "seed": 0},
    "synth-herglotz": {"density": None, "n": 32, "box": 20.0, "degree": 32,
                       "ray": None, "ray_max": 10.0, "ray_num": 101},
    "bstar": {"density": None, "r_max": 200.0, "num": 128, "degree": 32, "tol": 0.01},
    "subordinate": {"fn": None, "matrix": None, "m": 8, "tol": 1e-8, "seed": 0},
    "catalogue": {},
}

SUITE_TOL = {"on-sphere": 1e-12, "sweep": 1e-10}

REF_EIGEN = "f(-Lap) u = f(1) u for fields with Fourier support on the unit sphere"
REF_EQUIV = "(f(-Lap) - f(1)) = omega(-Lap)(-Lap - 1) on each Fourier mode"
REF_HERGLOTZ = "solutions are Herglotz waves u(x) = <T, exp(-i x . xi)>"
REF_BSTAR = "L2 densities give sup_R (1/R) int_{|x|<R} |u|^2 < infinity"
REF_BANACH = "A u = u implies f(A) u = f(1) u for Bernstein f"


class UsageError(Exception):
    pass


def _assertion(name: str, value, tol, passed: bool, ref: str, **extra) -> dict:
    out = {"name": name, "value": value, "tol": tol, "pass": bool(passed), "paper_ref": ref}
    out.update(extra)
    return out


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _emit(text: str, path: Optional[str]):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# configuration


def _float_list(s) -> list[float]:
    if isinstance(s, (list, tuple)):
        return [float(v) for v in s]
    try:
        return [float(v) for v in str(s).split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {s!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--fn", help="function id, e.g. fractional:0.5, log1p, affine:1,2")
    shared.add_argument("--d", type=int)
    shared.add_argument("--n", type=int, help="samples per axis")
    shared.add_argument("--box", type=float, help="periodic box side length")
    shared.add_argument("--degree", type=int, help="sphere quadrature degree")
    shared.add_argument("--tol", type=float)
    shared.add_argument("--seed", type=int)
    shared.add_argument("--out", help="output file (stdout when omitted)")
    shared.add_argument("--config", help="JSON config file; explicit flags win")

    p = argparse.ArgumentParser(prog="bernstein-helmholtz", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("bernstein-eval", parents=[shared], help="tabulate f, f(1), f', omega")
    s.add_argument("--lambdas", help="comma-separated lambda values")

    s = sub.add_parser("verify-helmholtz", parents=[shared], help="FFT residual suites")
    s.add_argument("--suite", choices=("on-sphere", "sweep"))
    s.add_argument("--lambdas", help="|xi|^2 values for the sweep suite")
    s.add_argument("--csv", help="also write the sweep table as CSV")

    s = sub.add_parser("synth-herglotz", parents=[shared], help="sample a Herglotz wave")
    s.add_argument("--density", help="density JSON file")
    s.add_argument("--ray", help="comma-separated ray direction (default e_1)")
    s.add_argument("--ray-max", type=float)
    s.add_argument("--ray-num", type=int)
    s.add_argument("--csv", help="ray samples CSV")

    s = sub.add_parser("bstar", parents=[shared], help="B* profile of a Herglotz wave")
    s.add_argument("--density", help="density JSON file")
    s.add_argument("--r-max", type=float)
    s.add_argument("--num", type=int, help="number of radii")
    s.add_argument("--report", help="JSON report path (stdout when omitted)")

    s = sub.add_parser("subordinate", parents=[shared], help="Phillips calculus on a matrix")
    s.add_argument("--matrix", help="matrix file: m then m*m reals")
    s.add_argument("--m", type=int, help="size of the random matrix when --matrix is absent")
    s.add_argument("--report", help="JSON report path (stdout when omitted)")

    sub.add_parser("catalogue", parents=[shared], help="list built-in function ids")
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, the JSON config file and explicit flags (in that order)."""
    cfg = dict(DEFAULTS[args.command])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except FileNotFoundError as exc:
            raise UsageError(f"config file not found: {args.config}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed config JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        cmd = loaded.pop("command", args.command)
        if cmd != args.command:
            raise UsageError(f"config is for command {cmd!r}, not {args.command!r}")
        known = set(vars(args)) - {"command", "config"}
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in known:
                raise UsageError(f"unknown config key {key!r}")
            cfg[key] = value
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None:
            cfg[key] = value
        else:
            cfg.setdefault(key, None)
    tol = cfg.get("tol")
    if tol is not None and not (isinstance(tol, (int, float)) and tol > 0):
        raise UsageError("tolerances must be positive")
    for key in ("density", "matrix"):
        if cfg.get(key) is not None and not Path(cfg[key]).is_file():
            raise UsageError(f"{key} file not found: {cfg[key]}")
    return cfg


def _require(cfg, key):
    if cfg.get(key) is None:
        raise UsageError(f"--{key.replace('_', '-')} is required")
    return cfg[key]


# ---------------------------------------------------------------------------
# commands


def cmd_bernstein_eval(cfg) -> int:
    f = bn.from_id(_require(cfg, "fn"))
    lambdas = _float_list(cfg["lambdas"])
    if not lambdas or any(not lam > 0 for lam in lambdas):
        raise UsageError("lambdas must be positive")
    rows = []
    for lam in lambdas:
        fprime = bn.deriv(f, 1, lam)
        rows.append((lam, float(f(lam)), f.f1, float(fprime), float(bn.omega(f, lam))))
    if cfg.get("out"):
        bio.write_csv(cfg["out"], ("lambda", "f", "f1", "fprime", "omega"), rows)
    else:
        bio.write_csv_stream(sys.stdout, ("lambda", "f", "f1", "fprime", "omega"), rows)
    return EXIT_PASS


def _on_sphere_suite(f, cfg) -> dict:
    d, n, box = int(cfg["d"]), int(cfg["n"]), float(cfg["box"])
    L = box / (2.0 * math.pi)
    if abs(L - round(L)) > 1e-12 or round(L) < 1:
        raise UsageError("box must be an integer multiple of 2*pi")
    tol = cfg["tol"] if cfg["tol"] is not None else SUITE_TOL["on-sphere"]
    rng = np.random.default_rng(int(cfg["seed"]))
    modes = on_sphere_modes(d)
    coeffs = rng.standard_normal(len(modes)) + 1j * rng.standard_normal(len(modes))
    u = superpose_modes(d, n, box, modes, coeffs)
    rep = helmholtz_residual(u, f)
    ok = rep.res_f <= tol
    return {
        "suite": "on-sphere",
        "fn": f.name,
        "grid": {"d": d, "n": n, "box": box},
        "modes": [list(m) for m in modes],
        "res_f": rep.res_f,
        "res_lap": rep.res_lap,
        "spectral_offsphere_energy": rep.spectral_offsphere_energy,
        "assertions": [_assertion("res_f", rep.res_f, tol, ok, REF_EIGEN)],
    }


def _sweep_suite(f, cfg) -> tuple[dict, list]:
    d = int(cfg["d"])
    tol = cfg["tol"] if cfg["tol"] is not None else SUITE_TOL["sweep"]
    lambdas = _float_list(cfg["lambdas"])
    rows = omega_ratio_sweep(f, lambdas, d)
    table, assertions, csv_rows = [], [], []
    for r in rows:
        table.append({"lambda": r.lam, "res_f": r.res_f, "res_lap": r.res_lap, "ratio": r.ratio,
                      "omega_pred": r.omega_pred, "box": r.box, "mode": list(r.mode), "note": r.note})
        csv_rows.append((r.lam, r.res_f, r.res_lap, r.ratio, r.omega_pred))
        if r.ratio is None:
            continue
        err = abs(r.ratio - r.omega_pred)
        assertions.append(_assertion(f"ratio-omega@{r.lam:g}", err, tol, err <= tol, REF_EQUIV))
    return {"suite": "sweep", "fn": f.name, "d": d, "table": table, "assertions": assertions}, csv_rows


def cmd_verify_helmholtz(cfg) -> int:
    f = bn.from_id(_require(cfg, "fn"))
    if f.is_constant:
        raise UsageError("non-constant Bernstein function required")
    csv_rows = None
    if cfg["suite"] == "on-sphere":
        report = _on_sphere_suite(f, cfg)
    elif cfg["suite"] == "sweep":
        report, csv_rows = _sweep_suite(f, cfg)
    else:
        raise UsageError(f"unknown suite {cfg['suite']!r}")
    passed = all(a["pass"] for a in report["assertions"])
    report["pass"] = passed
    if csv_rows is not None and cfg.get("csv"):
        bio.write_csv(cfg["csv"], ("lambda", "res_f", "res_lap", "ratio", "omega_pred"), csv_rows)
    _emit(_dump_json(report), cfg.get("out"))
    return EXIT_PASS if passed else EXIT_FAIL


def _quad_for(density, cfg):
    if isinstance(density, PointMasses):
        return None
    return make_quadrature(density.d, int(cfg["degree"]))


def _check_dim(density, cfg):
    if cfg.get("d") is not None and int(cfg["d"]) != density.d:
        raise UsageError(f"--d {cfg['d']} does not match the density dimension {density.d}")


def cmd_synth_herglotz(cfg) -> int:
    density = bio.read_density(_require(cfg, "density"))
    _check_dim(density, cfg)
    d = density.d
    quad = _quad_for(density, cfg)
    n, box = int(cfg["n"]), float(cfg["box"])
    direction = np.eye(d)[0] if cfg.get("ray") is None else np.array(_float_list(cfg["ray"]))
    if direction.shape != (d,) or not np.linalg.norm(direction) > 0:
        raise UsageError(f"ray must be a nonzero vector in R^{d}")
    direction = direction / np.linalg.norm(direction)
    r = np.linspace(0.0, float(cfg["ray_max"]), int(cfg["ray_num"]))
    u_ray = herglotz(density, r[:, None] * direction, quad)

    # grid centred on the origin: points x - box/2
    grid = bio.sample_grid(lambda x: np.zeros(x.shape[:-1]), d, n, box)
    pts = grid.coordinates().reshape(-1, d) - 0.5 * box
    vals = np.concatenate([np.atleast_1d(herglotz(density, chunk, quad))
                           for chunk in np.array_split(pts, max(1, pts.shape[0] // 4096))])
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(u_ray))):
        return EXIT_FAIL
    grid = grid.with_values(vals.reshape((n,) * d))
    if cfg.get("out"):
        bio.write_grdf(cfg["out"], grid)
    rows = [(ri, ui.real, ui.imag) for ri, ui in zip(r, np.atleast_1d(u_ray))]
    if cfg.get("csv"):
        bio.write_csv(cfg["csv"], ("r", "re_u", "im_u"), rows)
    else:
        bio.write_csv_stream(sys.stdout, ("r", "re_u", "im_u"), rows)
    return EXIT_PASS


def cmd_bstar(cfg) -> int:
    density = bio.read_density(_require(cfg, "density"))
    _check_dim(density, cfg)
    quad = _quad_for(density, cfg)
    tol = float(cfg["tol"])
    res = bstar_norm(density, float(cfg["r_max"]), quad, num=int(cfg["num"]))
    assertions = [_assertion("sup_finite", res.sup, None, bool(np.isfinite(res.sup)), REF_BSTAR)]
    if res.limit is None or res.limit <= 0:
        assertions.append(_assertion("tail_limit", None, tol, False, REF_BSTAR,
                                     note="no finite large-R limit (atomic density)"))
    else:
        tail_err = abs(res.g[-1] - res.limit) / res.limit
        assertions.append(_assertion("tail_limit", tail_err, tol, tail_err <= tol, REF_BSTAR,
                                     limit=res.limit, g_rmax=float(res.g[-1])))
        assertions.append(_assertion("sup_ge_limit", res.sup / res.limit, tol,
                                     res.sup >= res.limit * (1.0 - tol), REF_BSTAR))
    passed = all(a["pass"] for a in assertions)
    if cfg.get("out"):
        bio.write_csv(cfg["out"], ("R", "g_R"), zip(res.R, res.g))
    report = {"d": density.d, "kind": density.kind, "r_max": float(cfg["r_max"]), "sup": res.sup,
              "limit": res.limit, "assertions": assertions, "pass": passed}
    _emit(_dump_json(report), cfg.get("report"))
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_subordinate(cfg) -> int:
    tol = float(cfg["tol"])
    if cfg.get("matrix") is not None:
        try:
            A = read_matrix(cfg["matrix"])
        except ValueError as exc:
            raise UsageError(f"bad matrix file: {exc}") from exc
    else:
        m = int(cfg["m"])
        if not 1 <= m <= 256:
            raise UsageError("--m must lie in [1, 256]")
        A = random_psd_with_unit_eigenvalue(m, np.random.default_rng(int(cfg["seed"])))
    gen = MatrixGenerator.from_matrix(A)
    fns = [bn.from_id(cfg["fn"])] if cfg.get("fn") else [f for f in bn.catalogue() if f.triple is not None]
    rows, assertions = [], []
    for f in fns:
        if f.triple is None:
            raise UsageError(f"{f.name} has no Lévy triple")
        try:
            rep = eigen_transfer_check(gen, f)
        except NoUnitEigenvalue as exc:
            sys.stderr.write(f"NoUnitEigenvalue: {exc}\n")
            return EXIT_FAIL
        spec_err = max(
            float(np.linalg.norm(phillips_apply(gen, f, v) - spectral_apply(gen, f, v)))
            for v in gen.eigenvectors.T
        )
        rows.append((f.name, rep.eigenvalue, rep.residual, spec_err))
        assertions.append(_assertion(f"eigen_transfer[{f.name}]", rep.residual, tol, rep.residual <= tol, REF_BANACH))
        assertions.append(_assertion(f"spectral_match[{f.name}]", spec_err, tol, spec_err <= tol, REF_BANACH))
    passed = all(a["pass"] for a in assertions)
    if cfg.get("out"):
        bio.write_csv(cfg["out"], ("fn", "eigenvalue", "residual", "spectral_err"), rows)
    _emit(_dump_json({"m": gen.m, "assertions": assertions, "pass": passed}), cfg.get("report"))
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_catalogue(cfg) -> int:
    rows = [(f.name, f.f1, f.fprime1, str(int(f.triple is not None))) for f in bn.catalogue()]
    header = ("id", "f1", "fprime1", "has_triple")
    if cfg.get("out"):
        bio.write_csv(cfg["out"], header, rows)
    else:
        bio.write_csv_stream(sys.stdout, header, rows)
    return EXIT_PASS


HANDLERS = {
    "bernstein-eval": cmd_bernstein_eval,
    "verify-helmholtz": cmd_verify_helmholtz,
    "synth-herglotz": cmd_synth_herglotz,
    "bstar": cmd_bstar,
    "subordinate": cmd_subordinate,
    "catalogue": cmd_catalogue,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        cfg = resolve_config(args)
        return HANDLERS[args.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NoUnitEigenvalue as exc:
        sys.stderr.write(f"NoUnitEigenvalue: {exc}\n")
        return EXIT_FAIL
    except (NonIntegrableMeasure, BudgetExceeded, NearZeroSymbol, FloatingPointError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"internal numeric failure: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    except (BernsteinHelmholtzError, OSError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
