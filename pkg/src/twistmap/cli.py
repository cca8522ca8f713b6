"""Command-line interface: ``twistmap <command> [options]``.

Commands
    timemap    evaluate T, T1 or T2 (optionally against the quadrature oracle)
    diagram    trace all branches and write CSV / JSON / SVG
    branch     sample one branch
    saddle     locate the fold of a Cl branch or of A with k >= 1
    stability  verdicts of every solution at a given half-length
    verify     shoot every point of a diagram file
    relax      relax one perturbed equilibrium of the gradient flow

Exit status is 0 on success, 1 when a verification fails and 2 on usage or
domain errors.  ``TWISTMAP_LOG`` (error, info or debug) sets the log level.
"""

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import asdict, replace

from .branches import BranchId, make_point
from .continuation import all_branches, build_diagram, find_saddle_node, solve_at_L, trace_branch
from .oracles import SHOOT_TOL, quad_oracle, relax, shoot_check
from .quadrature import DEFAULT_CONFIG, DomainError, QuadratureError
from .serialize import diagram_from_json, points_from_csv, write_outputs
from .stability import classify
from .timemaps import CellParams, alpha_of_beta, quarter_period, time_above, time_to_line

log = logging.getLogger("twistmap")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

_TOL_KEYS = ("rel_tol", "abs_tol", "max_subdivisions", "alpha_cap")

# fallbacks applied after the config file, for options whose argparse
# default is None so that "flag given" can be told apart from "flag absent"
_DEFAULTS = {
    "k_max": 4,
    "L_max": 8.0,
    "n_points": 100,
    "overlay_symmetric": False,
    "ordinate": "yminus",
    "branch": "Cl",
    "k": 0,
    "perturbation": 1e-3,
    "t_final": 50.0,
    "grid_size": 201,
    "root": 0,
    "tol": SHOOT_TOL,
    "degrees": False,
    "verify": False,
}


class UsageError(Exception):
    pass


def _setup_logging():
    level = os.environ.get("TWISTMAP_LOG", "").strip().lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(
        level=levels.get(level, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


# ---------------------------------------------------------------------------
# argument handling


def _add_cell(p):
    p.add_argument("--phi0", type=float, default=None, help="left boundary angle (x(-L) = -phi0)")
    p.add_argument("--phi1", type=float, default=None, help="right boundary angle (x(L) = phi1)")
    p.add_argument("--degrees", action="store_true", default=None, help="angles are given in degrees")


def _add_tolerances(p):
    g = p.add_argument_group("quadrature")
    g.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
    g.add_argument("--abs-tol", dest="abs_tol", type=float, default=None)
    g.add_argument("--max-subdivisions", dest="max_subdivisions", type=int, default=None)
    g.add_argument("--alpha-cap", dest="alpha_cap", type=float, default=None)


def _add_branch(p):
    p.add_argument("--branch", default=None, help="A, Cr, Cl or D (default Cl)")
    p.add_argument("--k", type=int, default=None, help="winding number (default 0)")


def build_parser():
    top = argparse.ArgumentParser(prog="twistmap", description=__doc__.split("\n")[0])
    top.add_argument("--config", default=None, help="JSON file of option values; command-line flags win")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("timemap", help="evaluate a time-map")
    p.add_argument("--map", dest="which", choices=["T", "T1", "T2"], required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--phi", type=float, default=None)
    p.add_argument("--degrees", action="store_true", default=None, help="alpha and phi in degrees")
    p.add_argument("--verify", action="store_true", default=None, help="also print the oracle difference")
    _add_tolerances(p)

    p = sub.add_parser("diagram", help="trace every branch and export the diagram")
    _add_cell(p)
    p.add_argument("--k-max", dest="k_max", type=int, default=None, help="largest winding number (default 4)")
    p.add_argument("--L-max", dest="L_max", type=float, default=None, help="largest half-length (default 8)")
    p.add_argument("--n-points", dest="n_points", type=int, default=None, help="samples per branch (default 100)")
    p.add_argument("--overlay-symmetric", dest="overlay_symmetric", action="store_true", default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--json", default=None)
    p.add_argument("--svg", default=None)
    p.add_argument("--ordinate", choices=["yminus", "yL"], default=None)
    _add_tolerances(p)

    p = sub.add_parser("branch", help="sample a single branch")
    _add_cell(p)
    _add_branch(p)
    p.add_argument("--L-max", dest="L_max", type=float, default=None)
    p.add_argument("--n-points", dest="n_points", type=int, default=None)
    _add_tolerances(p)

    p = sub.add_parser("saddle", help="locate the saddle-node of a folded branch")
    _add_cell(p)
    _add_branch(p)
    _add_tolerances(p)

    p = sub.add_parser("stability", help="verdict table at one half-length")
    _add_cell(p)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="field parameter instead of --L")
    p.add_argument("--k-max", dest="k_max", type=int, default=None)
    _add_tolerances(p)

    p = sub.add_parser("verify", help="shoot every point of a diagram file")
    p.add_argument("--input", required=True, help="diagram CSV or JSON")
    _add_cell(p)
    p.add_argument("--tol", type=float, default=None, help="largest accepted residual (default 1e-6)")

    p = sub.add_parser("relax", help="relax a perturbed equilibrium")
    _add_cell(p)
    _add_branch(p)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--root", type=int, default=None, help="which solution on a folded branch (0 = lower energy)")
    p.add_argument("--perturbation", type=float, default=None)
    p.add_argument("--t-final", dest="t_final", type=float, default=None)
    p.add_argument("--grid-size", dest="grid_size", type=int, default=None)
    return top


def _merge(args):
    """Combine argparse values, the --config file and built-in defaults."""
    opts = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                conf = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(conf, dict):
            raise UsageError("config file must hold a JSON object")
        tol = conf.pop("tolerances", {}) or {}
        opts.update({k.replace("-", "_"): v for k, v in conf.items()})
        opts.update(tol)
    for key, value in vars(args).items():
        if value is not None or key not in opts:
            opts[key] = value
    for key, value in _DEFAULTS.items():
        if opts.get(key) is None:
            opts[key] = value
    return argparse.Namespace(**opts)


def _angle(value, opts):
    return math.radians(value) if opts.degrees else value


def _cell(opts):
    if getattr(opts, "phi0", None) is None or getattr(opts, "phi1", None) is None:
        raise UsageError("--phi0 and --phi1 are required")
    return CellParams(_angle(float(opts.phi0), opts), _angle(float(opts.phi1), opts))


def _cfg(opts):
    over = {k: getattr(opts, k) for k in _TOL_KEYS if getattr(opts, k, None) is not None}
    return replace(DEFAULT_CONFIG, **over) if over else DEFAULT_CONFIG


def _branch(opts):
    try:
        return BranchId(opts.branch, int(opts.k))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _g(x):
    return f"{x:.15g}"


# ---------------------------------------------------------------------------
# commands


def cmd_timemap(opts, out):
    cfg = _cfg(opts)
    which = opts.which
    if which == "T":
        if opts.alpha is None:
            raise UsageError("--map T needs --alpha")
        args = (_angle(opts.alpha, opts),)
        value = quarter_period(*args, cfg)
    elif which == "T1":
        if opts.alpha is None or opts.phi is None:
            raise UsageError("--map T1 needs --alpha and --phi")
        args = (_angle(opts.alpha, opts), _angle(opts.phi, opts))
        value = time_to_line(*args, cfg)
    else:
        if opts.beta is None or opts.phi is None:
            raise UsageError("--map T2 needs --beta and --phi")
        args = (opts.beta, _angle(opts.phi, opts))
        if args[0] < math.sqrt(2.0):
            raise DomainError(
                f"beta={args[0]!r} below sqrt(2); the closed-orbit value is "
                f"T1(alpha={alpha_of_beta(args[0])!r}, phi)"
            )
        value = time_above(*args, cfg)
    print(_g(value), file=out)
    if opts.verify:
        ref = quad_oracle(which, args)
        print(f"oracle {_g(ref)} delta {abs(value - ref):.3e}", file=out)
    return EXIT_OK


def cmd_diagram(opts, out):
    cell = _cell(opts)
    cfg = _cfg(opts)
    k_max, L_max, n_points = int(opts.k_max), float(opts.L_max), int(opts.n_points)
    if n_points < 2:
        raise UsageError("--n-points must be at least 2")
    diagram = build_diagram(cell, k_max, L_max, n_points, bool(opts.overlay_symmetric), cfg)
    config = {
        "phi0": cell.phi0,
        "phi1": cell.phi1,
        "k_max": k_max,
        "L_max": L_max,
        "n_points": n_points,
        "overlay_symmetric": bool(opts.overlay_symmetric),
        "ordinate": opts.ordinate,
        "tolerances": asdict(cfg),
        "csv": getattr(opts, "csv", None),
        "json": getattr(opts, "json", None),
        "svg": getattr(opts, "svg", None),
    }
    paths = write_outputs(
        diagram,
        csv_path=config["csv"],
        json_path=config["json"],
        svg_path=config["svg"],
        config=config,
        ordinate=opts.ordinate,
    )
    print(f"{len(diagram)} points on {len(diagram.points)} branches, {len(diagram.saddles)} saddle-nodes", file=out)
    for c in diagram.criticals:
        print(f"k={c.k}  T_star/2={_g(0.5 * c.T_star)}  T_upper/2={_g(0.5 * c.T_upper)}", file=out)
    for s in diagram.saddles:
        print(f"SN {s.branch.label}  alpha={_g(s.alpha)}  L_sn={_g(s.L_sn)}", file=out)
    for p in paths:
        print(f"wrote {p}", file=out)
    return EXIT_OK


def cmd_branch(opts, out):
    cell = _cell(opts)
    branch = _branch(opts)
    pts = trace_branch(cell, branch, int(opts.n_points), float(opts.L_max), _cfg(opts))
    print("regime,param,L,lambda,y_minus,y_plus,stability", file=out)
    for p in pts:
        print(
            ",".join([p.param.regime.value, _g(p.param.value), _g(p.L), _g(p.lam), _g(p.y_minus), _g(p.y_plus),
                      p.stability.value]),
            file=out,
        )
    return EXIT_OK


def cmd_saddle(opts, out):
    cell = _cell(opts)
    sn = find_saddle_node(cell, _branch(opts), _cfg(opts))
    print(f"branch {sn.branch.label}", file=out)
    print(f"alpha_sn {_g(sn.alpha)}", file=out)
    print(f"mtilde_sn {_g(sn.mtilde)}", file=out)
    print(f"L_sn {_g(sn.L_sn)}", file=out)
    print(f"lambda_sn {_g(8.0 * sn.L_sn ** 2)}", file=out)
    return EXIT_OK


def cmd_stability(opts, out):
    cell = _cell(opts)
    cfg = _cfg(opts)
    if getattr(opts, "lam", None) is not None:
        L = math.sqrt(float(opts.lam) / 8.0)
    elif getattr(opts, "L", None) is not None:
        L = float(opts.L)
    else:
        raise UsageError("give --L or --lambda")
    print("branch,k,regime,param,y_minus,y_plus,zeros,rule,verdict", file=out)
    for branch in all_branches(int(opts.k_max)):
        for param in solve_at_L(cell, branch, L, cfg):
            p = make_point(cell, branch, param, cfg)
            v = classify(cell, branch, param, cfg)
            print(
                ",".join([branch.kind.value, str(branch.k), param.regime.value, _g(param.value), _g(p.y_minus),
                          _g(p.y_plus), str(v.zero_count), v.rule.value, v.verdict.value]),
                file=out,
            )
    return EXIT_OK


def _read_points(opts):
    try:
        with open(opts.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {opts.input}: {exc}") from exc
    if text.lstrip().startswith("{"):
        diagram = diagram_from_json(text)
        return diagram.cell, list(diagram.all_points())
    return _cell(opts), points_from_csv(text)


def cmd_verify(opts, out):
    cell, points = _read_points(opts)
    if not points:
        raise UsageError("no points to verify")
    worst, where = -1.0, None
    for p in points:
        r = shoot_check(cell, p)
        if r > worst:
            worst, where = r, p
    ok = worst <= float(opts.tol)
    print(f"points {len(points)}", file=out)
    print(f"max_residual {worst:.3e} at {where.branch.label} L={_g(where.L)}", file=out)
    print("PASS" if ok else "FAIL", file=out)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_relax(opts, out):
    cell = _cell(opts)
    branch = _branch(opts)
    if getattr(opts, "L", None) is None:
        raise UsageError("--L is required")
    roots = solve_at_L(cell, branch, float(opts.L))
    if not roots:
        raise DomainError(f"no {branch.label} solution at L={opts.L}")
    idx = int(opts.root)
    if not 0 <= idx < len(roots):
        raise UsageError(f"--root must be below {len(roots)}")
    param = roots[idx]
    point = make_point(cell, branch, param)
    verdict = classify(cell, branch, param).verdict
    run = relax(cell, point, float(opts.perturbation), float(opts.t_final), int(opts.grid_size))
    print(f"branch {branch.label} param {_g(param.value)} L {_g(point.L)} lambda {_g(run.lam)}", file=out)
    print(f"classifier {verdict.value}", file=out)
    print(f"distance {run.distance:.3e} after t={_g(run.t_final)}", file=out)
    print(f"outcome {run.outcome.value}", file=out)
    return EXIT_OK


_COMMANDS = {
    "timemap": cmd_timemap,
    "diagram": cmd_diagram,
    "branch": cmd_branch,
    "saddle": cmd_saddle,
    "stability": cmd_stability,
    "verify": cmd_verify,
    "relax": cmd_relax,
}


def main(argv=None, out=None):
    _setup_logging()
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        opts = _merge(args)
        return _COMMANDS[opts.command](opts, out)
    except (UsageError, DomainError, QuadratureError, ValueError, OSError) as exc:
        print(f"twistmap {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
