"""Command-line front end.

Exit codes: 0 success, 2 argument error, 3 numerical failure.  Output goes to
stdout unless ``--output`` is given; relative output paths are resolved
against ``$CBHMETRIC_OUTPUT_DIR`` when that variable is set.  Files are
written atomically, so a failed run never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import os
import sys
import tempfile
import warnings

import numpy as np

from . import analysis, dieudonne, evolution, hamiltonian
from .errors import CBHError, NonPositiveMetric, NoSignChange, NumericalError
from .families import NAMED_FAMILIES, GAMMA_MAX, named_family
from .serialize import dumps

OUTPUT_DIR_ENV = "CBHMETRIC_OUTPUT_DIR"
FIGURES = {
    1: ("delta_rule", 4, {"nu": 1}),
    2: ("chessboard", 5, {}),
}


class UsageError(Exception):
    pass


def figure_grid(figure: int, steps: int | None = None) -> np.ndarray:
    """Default gamma grids for the two eigencurve figures.

    Figure 1 runs up to 0.999 so the gamma -> 1 limit is visible; figure 2
    steps by 1e-3 across the positivity boundary of the N = 5 chessboard.
    """
    if figure == 1:
        base = np.linspace(0.0, 0.99, steps or 100)
        return np.unique(np.concatenate([base, [0.995, 0.999]]))
    return np.linspace(0.0, 0.6, steps or 601)


def _parse_floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=_positive_int, default=None, help="matrix dimension")
    common.add_argument("--gamma", type=float, default=None)
    common.add_argument("--family", choices=NAMED_FAMILIES, default=None)
    common.add_argument("--nu", type=int, default=None, help="delta_rule exponent option (N=4)")
    common.add_argument("--y", type=float, default=None, help="chessboard free parameter")
    common.add_argument("--w", type=float, default=None, help="chessboard free parameter")
    common.add_argument("--params", type=_parse_floats, default=None,
                        help="first-row real parts, comma separated, starting with 1")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--output", default=None)

    p = argparse.ArgumentParser(prog="cbhmetric", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    h = sub.add_parser("hamiltonian", parents=[common], help="emit H")
    h.add_argument("--v", type=float, default=1.0)
    h.add_argument("--c", type=float, default=0.0)
    s = sub.add_parser("spectrum", parents=[common], help="eigenvalues of H")
    s.add_argument("--v", type=float, default=1.0)
    s.add_argument("--c", type=float, default=0.0)
    ph = sub.add_parser("phase", parents=[common], help="unbroken / boundary / broken")
    ph.add_argument("--v", type=float, default=1.0)
    ph.add_argument("--c", type=float, default=0.0)

    m = sub.add_parser("metric", parents=[common], help="metric candidate with residuals")
    m.add_argument("--method", choices=("family", "recurrence", "nullspace", "spectral"),
                   default="family")

    pos = sub.add_parser("positivity", parents=[common], help="positivity over a gamma range")
    pos.add_argument("--gamma-range", nargs=3, metavar=("LO", "HI", "STEPS"), required=True)

    sub.add_parser("critical-gamma", parents=[common], help="end of the positivity domain")

    se = sub.add_parser("series", parents=[common], help="small-gamma coefficients A_j, B_j")
    se.add_argument("--order", type=int, default=2)

    ev = sub.add_parser("evolve", parents=[common], help="norm audit of exp(-iHt) psi0")
    ev.add_argument("--metric-gamma", type=float, default=None,
                    help="gamma at which the metric is built (default: --gamma)")
    ev.add_argument("--t-max", type=float, default=10.0)
    ev.add_argument("--steps", type=int, default=101)
    ev.add_argument("--psi0", type=_parse_floats, default=None)

    f = sub.add_parser("figure", parents=[common], help="eigencurve CSV (figure 1 or 2)")
    f.add_argument("number", nargs="?", type=int, choices=(1, 2))
    f.add_argument("--figure", type=int, choices=(1, 2), dest="figure_opt")
    f.add_argument("--steps", type=int, default=None)
    return p


# --------------------------------------------------------------------------
# helpers


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required for '{args.command}'")


def _family_options(args) -> dict:
    opts = {}
    if args.nu is not None:
        opts["nu"] = args.nu
    if args.y is not None:
        opts["y"] = args.y
    if args.w is not None:
        opts["w"] = args.w
    if args.params is not None:
        opts["params"] = args.params
    return opts


def _meta(args, family=None, gamma=None, **extra) -> dict:
    meta = {
        "family": family if family is not None else args.family,
        "N": args.N,
        "gamma": gamma if gamma is not None else args.gamma,
        "tolerances": {"tol": args.tol},
    }
    meta.update(extra)
    return meta


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _complex_rows(values):
    return [(k, float(z.real), float(z.imag)) for k, z in enumerate(values)]


def _gamma_range(args) -> np.ndarray:
    lo, hi, steps = args.gamma_range
    try:
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise UsageError("--gamma-range expects LO HI STEPS")
    if not lo < hi or steps < 2:
        raise UsageError("--gamma-range requires LO < HI and STEPS >= 2")
    return np.linspace(lo, hi, steps)


# --------------------------------------------------------------------------
# subcommands


def cmd_hamiltonian(args, fmt):
    _require(args, "N", "gamma")
    H = hamiltonian.cbh(args.N, args.gamma, args.v, args.c)
    if fmt == "csv":
        return _csv(["row", "col", "re", "im"],
                    [(i, j, float(H[i, j].real), float(H[i, j].imag))
                     for i in range(args.N) for j in range(args.N)])
    return dumps({"metadata": _meta(args, v=args.v, c=args.c), "matrix": H})


def cmd_spectrum(args, fmt):
    _require(args, "N", "gamma")
    tol = 1e-9 if args.tol is None else args.tol
    rep = hamiltonian.spectrum(hamiltonian.cbh(args.N, args.gamma, args.v, args.c), tol)
    if fmt == "csv":
        return _csv(["index", "re", "im"], _complex_rows(rep.eigenvalues))
    meta = _meta(args, v=args.v, c=args.c)
    meta["tolerances"] = {"reality": tol}
    return dumps({"metadata": meta, "spectrum": rep})


def cmd_phase(args, fmt):
    _require(args, "N", "gamma")
    tol = 1e-9 if args.tol is None else args.tol
    p = hamiltonian.CbhParams(args.N, gamma=args.gamma, v=args.v, c=args.c)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        verdict = hamiltonian.classify_phase(p, tol)
    if fmt == "csv":
        return _csv(["gamma", "phase", "ep_distance", "method"],
                    [(verdict.gamma, verdict.phase, verdict.ep_distance, verdict.method)])
    meta = _meta(args, v=args.v, c=args.c)
    meta["tolerances"] = {"reality": tol, "boundary": 1e-6}
    meta["warnings"] = [str(w.message) for w in caught]
    return dumps({"metadata": meta, "phase": verdict})


def _metric(args):
    _require(args, "N", "gamma")
    H = hamiltonian.cbh(args.N, args.gamma)
    method = getattr(args, "method", "family")
    row = args.params
    if method == "family":
        family = args.family or ("general" if row is not None else "zero_param")
        return named_family(args.N, family, args.gamma, **_family_options(args))
    if row is None:
        row = [1.0] + [0.0] * (args.N - 1)
    params = dieudonne.MetricParams(tuple(row))
    if params.N != args.N:
        raise UsageError("--params length must equal --N")
    if method == "recurrence":
        return dieudonne.metric_from_first_row(H, params, args.gamma)
    if method == "nullspace":
        tol = 1e-10 if args.tol is None else args.tol
        basis = [c.matrix for c in dieudonne.solve_nullspace(H, tol=tol, gamma=args.gamma)]
        theta = dieudonne.project_onto_first_row(basis, params.as_array())
        return dieudonne.make_candidate(H, theta, "general", params, args.gamma)
    weights = dieudonne.fit_spectral_weights(H, params.as_array())
    return dieudonne.spectral_metric(H, weights, normalize="first", gamma=args.gamma)


def cmd_metric(args, fmt):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cand = _metric(args)
    if fmt == "csv":
        T = cand.matrix
        return _csv(["row", "col", "re", "im"],
                    [(i, j, float(T[i, j].real), float(T[i, j].imag))
                     for i in range(cand.N) for j in range(cand.N)])
    meta = _meta(args, family=cand.family, method=args.method)
    meta["warnings"] = [str(w.message) for w in caught]
    body = {
        "metadata": meta,
        "matrix": cand.matrix,
        "params": cand.params,
        "options": cand.options,
        "hermiticity_residual": cand.hermiticity_residual,
        "dieudonne_residual": cand.dieudonne_residual,
    }
    return dumps(body)


def cmd_positivity(args, fmt):
    _require(args, "N")
    family = args.family or "zero_param"
    tol = 1e-12 if args.tol is None else args.tol
    opts = _family_options(args)
    grid = _gamma_range(args)
    reports = [analysis.positivity(analysis.family_matrix(family, args.N, float(g), opts),
                                   tol, float(g)) for g in grid]
    reports.sort(key=lambda r: r.gamma)
    if fmt == "csv":
        header = ["gamma", "min_eigenvalue", "positive_definite", "anisotropy"]
        return _csv(header, [(r.gamma, r.min_eigenvalue, int(r.positive_definite), r.anisotropy)
                             for r in reports])
    meta = _meta(args, family=family, gamma=[float(grid[0]), float(grid[-1]), len(grid)],
                 options=opts)
    meta["tolerances"] = {"positivity": tol}
    return dumps({"metadata": meta, "reports": reports})


def cmd_critical(args, fmt):
    _require(args, "N")
    family = args.family or "zero_param"
    tol = 1e-10 if args.tol is None else args.tol
    opts = _family_options(args)
    meta = _meta(args, family=family, options=opts,
                 search={"gamma_lo": 1e-3, "gamma_hi": 0.999, "scan_points": 256})
    meta["tolerances"] = {"bracket": tol, "positivity": 1e-12}
    try:
        res = analysis.find_gamma_critical(family, args.N, opts, tol=tol)
        body = {"gamma_critical": res.gamma_critical, "bracket": res.bracket,
                "bracket_width": res.bracket_width,
                "min_eig_at_boundary": res.min_eig_at_boundary, "sign_change": True}
    except NoSignChange as exc:
        body = {"gamma_critical": None, "sign_change": False, "last_gamma": exc.last_gamma,
                "min_eigenvalue": exc.min_eigenvalue, "message": str(exc)}
    meta["gamma"] = body["gamma_critical"]
    if fmt == "csv":
        return _csv(list(body), [list(body.values())])
    return dumps({"metadata": meta, **body})


def cmd_series(args, fmt):
    _require(args, "N")
    family = args.family or "chessboard"
    opts = _family_options(args)
    fit = analysis.fit_series(family, args.N, order=args.order, options=opts)
    if fmt == "json":
        meta = _meta(args, family=family, options=opts, grid=fit.grid,
                     basis_powers=list(range(1, args.order + 5)))
        meta["tolerances"] = {"fit_residual": fit.residual}
        return dumps({"metadata": meta, "A": fit.A, "B": fit.B, "residual": fit.residual})
    return _csv(["j", "A", "B"], [(j + 1, float(a), float(b))
                                  for j, (a, b) in enumerate(zip(fit.A, fit.B))])


def cmd_evolve(args, fmt):
    _require(args, "N", "gamma")
    family = args.family or "zero_param"
    mg = args.gamma if args.metric_gamma is None else args.metric_gamma
    tol = 1e-12 if args.tol is None else args.tol
    opts = _family_options(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        theta = named_family(args.N, family, mg, **opts)
    psi0 = np.zeros(args.N, dtype=complex)
    if args.psi0 is None:
        psi0[0] = 1.0
    else:
        if len(args.psi0) != args.N:
            raise UsageError("--psi0 length must equal --N")
        psi0[:] = args.psi0
    times = np.linspace(0.0, args.t_max, args.steps)
    trace = evolution.evolve(hamiltonian.cbh(args.N, args.gamma), theta, psi0, times, tol)
    if fmt == "csv":
        return _csv(["t", "theta_norm", "naive_norm"],
                    zip(trace.times, trace.theta_norms, trace.naive_norms))
    meta = _meta(args, family=family, metric_gamma=mg, options=opts,
                 times=[0.0, args.t_max, args.steps])
    meta["tolerances"] = {"expm": tol}
    body = {"metadata": meta, "times": trace.times, "theta_norms": trace.theta_norms,
            "naive_norms": trace.naive_norms, "max_drift": trace.max_drift,
            "naive_variation": trace.naive_variation}
    return dumps(body)


def cmd_figure(args, fmt):
    number = args.figure_opt if args.figure_opt is not None else args.number
    if number is None:
        raise UsageError("figure needs a number: 'figure 1' or '--figure 2'")
    family, N, opts = FIGURES[number]
    table = analysis.eigencurve_table(family, N, figure_grid(number, args.steps), opts)
    if fmt == "json":
        meta = {"family": family, "N": N, "gamma": [float(table.gamma[0]),
                                                    float(table.gamma[-1]), len(table.gamma)],
                "tolerances": {}, "options": opts,
                "gamma_max": GAMMA_MAX.get(("zero_param", N))}
        return dumps({"metadata": meta, "columns": table.columns, "gamma": table.gamma,
                      "eigenvalues": table.eigenvalues})
    return table.to_csv()


COMMANDS = {
    "hamiltonian": (cmd_hamiltonian, "json"),
    "spectrum": (cmd_spectrum, "json"),
    "phase": (cmd_phase, "json"),
    "metric": (cmd_metric, "json"),
    "positivity": (cmd_positivity, "json"),
    "critical-gamma": (cmd_critical, "json"),
    "series": (cmd_series, "csv"),
    "evolve": (cmd_evolve, "json"),
    "figure": (cmd_figure, "csv"),
}


def resolve_output(path: str | None) -> str | None:
    if path is None:
        return None
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    return path


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cbhmetric-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(argv=None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, execute one subcommand and return the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func, default_fmt = COMMANDS[args.command]
    fmt = args.format or default_fmt
    try:
        text = func(args, fmt)
    except (UsageError, argparse.ArgumentTypeError) as exc:
        parser.print_usage(stderr)
        print(f"cbhmetric: error: {exc}", file=stderr)
        return 2
    except (NumericalError, NonPositiveMetric) as exc:
        print(f"cbhmetric: numerical failure: {type(exc).__name__}: {exc}", file=stderr)
        return 3
    except (CBHError, ValueError) as exc:
        parser.print_usage(stderr)
        print(f"cbhmetric: error: {type(exc).__name__}: {exc}", file=stderr)
        return 2
    path = resolve_output(args.output)
    if path is None:
        stdout.write(text)
    else:
        write_atomic(path, text)
    return 0


def main() -> None:
    sys.exit(run())
