"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 bad parameters,
3 input validation, 4 solver or numerical failure.
"""
import argparse
import io
import json
import math
import sys

import numpy as np

from .errors import (AccuracyError, DivergenceError, DomainError, PointSetError,
                     PreconditionError, SingularMatrixError)
from .quadrature import QuadratureConfig

EXIT_OK, EXIT_VERIFY, EXIT_PARAM, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _fmt(x):
    return repr(float(x))


def _json_value(x):
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return str(x)


def _emit(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _grid(spec):
    try:
        lo, hi, step = (float(v) for v in spec.split(":"))
    except ValueError:
        raise CliError(f"--grid expects lo:hi:step, got {spec!r}", EXIT_PARAM)
    if not step > 0 or hi < lo:
        raise CliError("--grid needs step > 0 and hi >= lo", EXIT_PARAM)
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def _abscissae(args, name):
    if args.grid:
        return _grid(args.grid)
    values = getattr(args, name)
    if values:
        return np.array(values, dtype=float)
    raise CliError(f"give --grid or --{name}", EXIT_PARAM)


def _cfg(args):
    tol = getattr(args, "tol", None)
    if tol is None:
        return QuadratureConfig()
    if not tol > 0:
        raise CliError("--tol must be positive", EXIT_PARAM)
    return QuadratureConfig(rel_tol=tol, abs_tol=min(tol, 1e-14))


def _spec(args, n=None):
    from .kernels import kernel_from_name

    return kernel_from_name(args.kernel, args.alpha, args.beta, args.lam,
                            n if n is not None else args.n)


def _read_matrix(path, what):
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read {what} file {path!r}: {exc}", EXIT_INPUT)
    if data.size == 0:
        raise CliError(f"{what} file {path!r} is empty", EXIT_INPUT)
    return data


def _points(args):
    from .schoenberg import build_point_set

    if args.points:
        coords = _read_matrix(args.points, "points")
    elif args.random:
        rng = np.random.default_rng(args.seed)
        side = 2.0 * args.random ** (1.0 / args.n)
        coords = rng.uniform(0.0, side, size=(args.random, args.n))
    else:
        raise CliError("give --points FILE or --random N", EXIT_PARAM)
    return build_point_set(coords)


def _csv(header, rows, comments=()):
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_eval(args):
    from .kernels import kernel_eval, radial_fourier

    spec = _spec(args)
    cfg = _cfg(args)
    if args.fourier:
        xs = _abscissae(args, "xi")
        vals = radial_fourier(spec, xs, cfg)
        text = _csv(["xi", "fourier_value"], zip(xs, vals))
    else:
        zs = _abscissae(args, "z")
        vals = kernel_eval(spec, zs, cfg)
        text = _csv(["z", "value"], zip(zs, vals))
    _emit(text, args.out)
    return EXIT_OK


def cmd_transform(args):
    from .hstransform import beta_type_density, binomial_density, hs_forward
    from .specfun import matern_norm

    if args.alpha is None or args.lam is None:
        raise CliError("transform needs --alpha and --lambda", EXIT_PARAM)
    rs = _abscissae(args, "z")
    if args.density == "beta":
        nu = beta_type_density(args.alpha, args.lam)
        expected = matern_norm(args.alpha, rs)
    else:
        nu = binomial_density(args.alpha, args.lam)
        expected = (1.0 + rs * rs) ** (-args.alpha - args.lam - 1.0)
    res = hs_forward(nu, args.lam, rs, _cfg(args))
    text = _csv(["r", "value", "expected"], zip(rs, res.phi, expected),
                [f"density={nu.label} order={args.lam!r} est_error={res.est_error!r}"])
    _emit(text, args.out)
    return EXIT_OK


def cmd_certify(args):
    from .kernels import InnerProductSpace
    from .schoenberg import certify, riesz_certificate

    X = _points(args)
    spec = _spec(args, X.ambient_dim)
    if args.space:
        space = InnerProductSpace(args.space, X.ambient_dim,
                                  0.0 if args.space == "L2" else _space_alpha(args, spec))
        cert = riesz_certificate(space, spec, X, args.spectral_N, _cfg(args))
    else:
        cert = certify(spec, X, args.spectral_N, _cfg(args))
    _emit(json.dumps(_json_value(cert.to_dict()), indent=2) + "\n", args.out)
    return EXIT_OK


def _space_alpha(args, spec):
    if args.space == "KSpace":
        return spec.beta - spec.n / 2
    return spec.alpha


def cmd_interpolate(args):
    from .interpolate import eval_interpolant, make_interpolant, solve_lagrange
    from .schoenberg import assemble

    if not (args.points and args.samples and args.eval):
        raise CliError("interpolate needs --points, --samples and --eval", EXIT_PARAM)
    X = _points(args)
    samples = _read_matrix(args.samples, "samples")
    if samples.shape[1] != 1:
        raise CliError("samples file must have a single column", EXIT_INPUT)
    if samples.shape[0] != X.size:
        raise CliError(f"{samples.shape[0]} samples for {X.size} points", EXIT_SOLVER)
    targets = _read_matrix(args.eval, "evaluation points")
    if targets.shape[1] != X.ambient_dim:
        raise CliError("evaluation points have the wrong dimension", EXIT_INPUT)
    spec = _spec(args, X.ambient_dim)
    basis = solve_lagrange(assemble(spec, X), args.reg)
    interp = make_interpolant(basis, samples[:, 0])
    vals = eval_interpolant(interp, targets)
    header = [f"x{i + 1}" for i in range(X.ambient_dim)] + ["value"]
    rows = [list(p) + [v] for p, v in zip(targets, vals)]
    text = _csv(header, rows, [f"kernel={spec.describe()} reg={args.reg!r} "
                               f"solve_residual={basis.solve_residual!r}"])
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args):
    from .verify import run_identity_suite

    report = run_identity_suite(_cfg(args), args.tol)
    _emit(json.dumps(_json_value(report), indent=2) + "\n", args.out)
    return EXIT_OK if report["all_pass"] else EXIT_VERIFY


COMMANDS = {
    "eval": cmd_eval,
    "transform": cmd_transform,
    "certify": cmd_certify,
    "interpolate": cmd_interpolate,
    "verify": cmd_verify,
}


def build_parser():
    p = argparse.ArgumentParser(prog="hsmatern", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--kernel", default="matern-norm",
                        choices=["matern", "matern-norm", "g", "f", "imq"])
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--lambda", dest="lam", type=float)
        sp.add_argument("--n", type=int, default=1)
        sp.add_argument("--out")
        sp.add_argument("--tol", type=float)
        return sp

    sp = common(sub.add_parser("eval", help="tabulate a kernel or its Fourier transform"))
    sp.add_argument("--grid")
    sp.add_argument("--z", type=float, nargs="+")
    sp.add_argument("--fourier", action="store_true")
    sp.add_argument("--xi", type=float, nargs="+")

    sp = common(sub.add_parser("transform", help="forward transform of a cataloged density"))
    sp.add_argument("--density", choices=["beta", "binomial"], default="beta")
    sp.add_argument("--grid")
    sp.add_argument("--z", type=float, nargs="+", help="radii")

    sp = common(sub.add_parser("certify", help="certify a Schoenberg matrix"))
    sp.add_argument("--points")
    sp.add_argument("--random", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--spectral-N", dest="spectral_N", type=int)
    sp.add_argument("--space", choices=["L2", "Sobolev", "KSpace"])

    sp = common(sub.add_parser("interpolate", help="Lagrange-type interpolation"))
    sp.add_argument("--points")
    sp.add_argument("--random", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples")
    sp.add_argument("--eval")
    sp.add_argument("--reg", type=float, default=0.0)

    sp = sub.add_parser("verify", help="run the identity suite")
    sp.add_argument("--out")
    sp.add_argument("--tol", type=float)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except PointSetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except SingularMatrixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (AccuracyError, DivergenceError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
