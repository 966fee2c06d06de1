"""Command-line experiment runner.

Every command writes one JSON report that echoes its fully resolved
configuration, so a run can be reproduced from the report alone. Exit status:
0 on success (or a purely descriptive report), 1 when an inequality check
fails beyond tolerance, 2 on usage or I/O errors.

A JSON config file can stand in for the flags::

    polycotype --config run.json       # {"command": "kahane", "space": "lp:4:5", "m": 3, ...}
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .cotype import (
    classical_cotype_ratio,
    estimate_constant,
    kahane_check,
    lambda_cotype_ratio,
    rademacher_alpha_check,
    weissler_check,
)
from .dirichlet import MultiplicativeSequence, multiplier_diagnostic
from .index import AllUpToDegree, Homogeneous, Linear, MultiIndex, bohr_index, bohr_integer, parse_index_set
from .mon import PowerLaw, abs_monomial_sum, b_criterion, divergence_witness, eroica_chain_check, witness_trajectory
from .norms import DEFAULT_SAMPLES, NormConfig
from .poly import random_polynomial
from .spaces import SequenceSpace, known_cotype, parse_exponent, parse_space

SCHEMA_VERSION = "1.0"
COMMANDS = (
    "kahane", "weissler", "cotype-ratio", "lambda-cotype", "estimate-constant", "rademacher",
    "bohr", "multiplier", "mon-sum", "b-criterion", "witness", "eroica",
)


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(parse_exponent(t)) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(float(t)) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _exp(text: str) -> float:
    try:
        return parse_exponent(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad exponent {text!r}") from None


# ------------------------------------------------------------ commands


def _cfg(args) -> NormConfig:
    return NormConfig(args.norm_method, args.samples, args.seed, args.points_per_var, args.workers)


def _space(args):
    try:
        return parse_space(args.space)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_kahane(args):
    f = random_polynomial(_space(args), args.vars, Homogeneous(args.m), args.dist, args.seed)
    rep = kahane_check(f, args.r, args.s, _cfg(args))
    return rep.to_json(), rep.passed, None


def cmd_weissler(args):
    f = random_polynomial(_space(args), args.vars, AllUpToDegree(args.degree), args.dist, args.seed)
    rep = weissler_check(f, args.s, args.r, _cfg(args))
    return rep.to_json(), rep.passed, None


def _family_vectors(space, n, family, seed):
    if family == "basis":
        if n > space.real_dim:
            raise UsageError(f"basis family of size {n} does not fit in {space}")
        return [space.basis(k) for k in range(n)]
    f = random_polynomial(space, n, Linear(), "unitSphere", seed)
    return list(f.coefficients)


def cmd_cotype_ratio(args):
    space = _space(args)
    vecs = _family_vectors(space, args.vars, args.family, args.seed)
    rep = classical_cotype_ratio(space, vecs, args.q, _cfg(args))
    return rep.to_json(), None, None


def cmd_lambda_cotype(args):
    space = _space(args)
    iset = _index_set(args.set)
    f = random_polynomial(space, args.vars, iset, args.dist, args.seed)
    if args.family == "basis":
        if len(f) > space.real_dim:
            raise UsageError(f"basis family of size {len(f)} does not fit in {space}")
        f = f.with_coefficients(np.stack([space.basis(k) for k in range(len(f))]))
    rep = lambda_cotype_ratio(f, iset, args.q, _cfg(args))
    return rep.to_json(), None, None


def _index_set(text):
    try:
        return parse_index_set(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_estimate_constant(args):
    res = estimate_constant(
        _space(args), args.q, _index_set(args.set), args.vars, args.budget, args.seed, _cfg(args), steps=args.steps
    )
    out = res.report.to_json()
    out["restarts"] = res.restarts
    out["witness"] = res.witness.to_json()
    return out, None, None


def cmd_rademacher(args):
    space = _space(args)
    f = random_polynomial(space, args.vars, Homogeneous(args.m), args.dist, args.seed)
    rep = rademacher_alpha_check(f, args.q, args.sign_samples, _cfg(args), args.seed)
    return rep.to_json(), None, None


def cmd_bohr(args):
    if (args.n is None) == (args.alpha is None):
        raise UsageError("bohr needs exactly one of --n or --alpha")
    if args.n is not None:
        if args.n < 1:
            raise UsageError("--n must be a positive integer")
        return {"n": args.n, "alpha": bohr_index(args.n).to_json()}, None, None
    try:
        alpha = MultiIndex(args.alpha)
        return {"alpha": alpha.to_json(), "n": bohr_integer(alpha)}, None, None
    except (ValueError, OverflowError) as exc:
        raise UsageError(str(exc)) from None


def cmd_multiplier(args):
    space = _space(args)
    if (args.sigma is None) == (args.values is None):
        raise UsageError("multiplier needs exactly one of --sigma or --values")
    if args.sigma is not None:
        if args.sigma <= 0:
            raise UsageError("--sigma must be > 0")
        b = MultiplicativeSequence.power_law(args.sigma, args.num_primes)
    else:
        b = MultiplicativeSequence.from_values(args.values)
    rep = multiplier_diagnostic(b, space, args.p, args.nmax, args.trials, args.seed, _cfg(args))
    full = rep.pop("trajectoryFull")
    rows = [(k + 1, float(v)) for k, v in enumerate(full)]
    return rep, None, (("k", "partialSum"), rows)


def cmd_mon_sum(args):
    try:
        res = abs_monomial_sum(args.z, args.degree)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = res.to_json()
    out["withinTailBound"] = bool(0 <= res.gap <= res.tail_bound + 1e-12 * res.product)
    return out, None, None


def cmd_b_criterion(args):
    if args.u is not None:
        u = args.u
    else:
        u = PowerLaw(args.theta, args.beta)
    try:
        diag = b_criterion(u, args.checkpoints)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = diag.to_json()
    return out, None, (("n", "R_n"), diag.checkpoints)


def cmd_witness(args):
    q = args.q
    z = args.z if args.z is not None else PowerLaw(args.theta, args.beta)
    ns = sorted(args.N)
    traj = witness_trajectory(q, z, ns, args.weights)
    reports = [divergence_witness(SequenceSpace(q, n), z, n, args.weights) for n in ns]
    out = {"q": "inf" if math.isinf(q) else q, "reports": reports, "logSlope": traj["logSlope"]}
    return out, None, (("N", "sum", "bound"), traj["rows"])


def cmd_eroica(args):
    space = _space(args)
    if not space.is_hilbert:
        raise UsageError("eroica needs a Hilbert space (lp:2:d or schatten:2:d)")
    f = random_polynomial(space, args.vars, Homogeneous(args.m), args.dist, args.seed)
    try:
        rep = eroica_chain_check(f, args.y, _cfg(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return rep, rep["pass"], None


HANDLERS = {
    "kahane": cmd_kahane,
    "weissler": cmd_weissler,
    "cotype-ratio": cmd_cotype_ratio,
    "lambda-cotype": cmd_lambda_cotype,
    "estimate-constant": cmd_estimate_constant,
    "rademacher": cmd_rademacher,
    "bohr": cmd_bohr,
    "multiplier": cmd_multiplier,
    "mon-sum": cmd_mon_sum,
    "b-criterion": cmd_b_criterion,
    "witness": cmd_witness,
    "eroica": cmd_eroica,
}


# -------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: usage error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                        help="Monte-Carlo sample count (default from POLYCOTYPE_SAMPLES, else 20000)")
    common.add_argument("--output", "-o", default="-", help="report path, '-' for stdout")
    common.add_argument("--csv", default=None, help="write the trajectory (if any) to this CSV file")
    common.add_argument("--norm-method", choices=("auto", "mc", "grid", "exact"), default="auto")
    common.add_argument("--points-per-var", type=int, default=None)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--dist", choices=("unitSphere", "complexGaussian"), default="unitSphere")

    p = _Parser(prog="polycotype", description="Cotype constants of vector-valued polynomials on the polytorus.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="JSON file with 'command' and flag-named keys")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("kahane", parents=[common], help="polynomial Kahane inequality check")
    s.add_argument("--space", required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--vars", type=int, required=True)
    s.add_argument("--r", type=_exp, required=True)
    s.add_argument("--s", type=_exp, required=True)

    s = sub.add_parser("weissler", parents=[common], help="Poisson contraction check")
    s.add_argument("--space", required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--vars", type=int, required=True)
    s.add_argument("--s", type=_exp, required=True)
    s.add_argument("--r", type=_exp, required=True)

    s = sub.add_parser("cotype-ratio", parents=[common], help="classical cotype ratio")
    s.add_argument("--space", required=True)
    s.add_argument("--vars", type=int, required=True, help="number of vectors")
    s.add_argument("--q", type=_exp, default=2.0)
    s.add_argument("--family", choices=("basis", "random"), default="basis")

    s = sub.add_parser("lambda-cotype", parents=[common], help="cotype ratio over an index set")
    s.add_argument("--space", required=True)
    s.add_argument("--set", required=True, help="linear | homogeneous:m | single:k | upto:D")
    s.add_argument("--vars", type=int, required=True)
    s.add_argument("--q", type=_exp, default=2.0)
    s.add_argument("--family", choices=("basis", "random"), default="random")

    s = sub.add_parser("estimate-constant", parents=[common], help="lower bound for a best constant")
    s.add_argument("--space", required=True)
    s.add_argument("--set", required=True)
    s.add_argument("--vars", type=int, required=True)
    s.add_argument("--q", type=_exp, default=2.0)
    s.add_argument("--budget", type=int, default=10)
    s.add_argument("--steps", type=int, default=200)

    s = sub.add_parser("rademacher", parents=[common], help="random-sign average diagnostic")
    s.add_argument("--space", required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--vars", type=int, required=True)
    s.add_argument("--q", type=_exp, default=None)
    s.add_argument("--sign-samples", type=int, default=64)

    s = sub.add_parser("bohr", parents=[common], help="Bohr correspondence n <-> alpha")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--alpha", type=_ints, default=None)

    s = sub.add_parser("multiplier", parents=[common], help="l_1-multiplier diagnostic")
    s.add_argument("--space", required=True)
    s.add_argument("--sigma", type=float, default=None)
    s.add_argument("--values", type=_floats, default=None, help="explicit b_(p_k) values")
    s.add_argument("--num-primes", type=int, default=1000)
    s.add_argument("--p", type=_exp, default=2.0)
    s.add_argument("--nmax", type=int, default=10**4)
    s.add_argument("--trials", type=int, default=5)

    s = sub.add_parser("mon-sum", parents=[common], help="absolute monomial sum vs product formula")
    s.add_argument("--z", type=_floats, required=True)
    s.add_argument("--degree", type=int, required=True)

    s = sub.add_parser("b-criterion", parents=[common], help="R_n trajectory of the B criterion")
    s.add_argument("--u", type=_floats, default=None)
    s.add_argument("--theta", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=0.5)
    s.add_argument("--checkpoints", type=_ints, default=[10, 100, 1000, 10**4, 10**5, 10**6])

    s = sub.add_parser("witness", parents=[common], help="divergence witness in l_q^N")
    s.add_argument("--q", type=_exp, default=math.inf)
    s.add_argument("--z", type=_floats, default=None)
    s.add_argument("--theta", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--N", type=_ints, default=[100, 1000, 10000])
    s.add_argument("--weights", choices=("dual", "ones"), default="dual")

    s = sub.add_parser("eroica", parents=[common], help="three-link chain check over a Hilbert space")
    s.add_argument("--space", required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--vars", type=int, required=True)
    s.add_argument("--y", type=_floats, required=True)
    return p


def config_to_argv(data: dict) -> list[str]:
    """``{"command": "kahane", "m": 3, ...}`` -> ``["kahane", "--m", "3", ...]``."""
    if not isinstance(data, dict) or "command" not in data:
        raise UsageError("config file must be a JSON object with a 'command' key")
    argv = [str(data["command"])]
    for key, val in data.items():
        if key == "command":
            continue
        flag = "--" + key.replace("_", "-")
        if key in ("N",):
            flag = "--N"
        if isinstance(val, list):
            val = ",".join(str(v) for v in val)
        argv += [flag, str(val)]
    return argv


# -------------------------------------------------------------- output


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _resolved_config(args) -> dict:
    skip = {"config", "output", "csv"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(argv: list[str] | None = None, stdout=None) -> int:
    """Run one command; returns the process exit status."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.config:
            if args.command:
                raise UsageError("give either --config or a command, not both")
            try:
                with open(args.config) as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read config {args.config}: {exc}") from None
            try:
                args = parser.parse_args(config_to_argv(data))
            except SystemExit as exc:
                return int(exc.code or 0)
        if not args.command:
            parser.print_usage(sys.stderr)
            sys.stderr.write("polycotype: usage error: no command given\n")
            return 2
        if args.samples < 100:
            raise UsageError("--samples must be >= 100")
        result, passed, table = HANDLERS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"polycotype: usage error: {exc}\n")
        return 2
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        sys.stderr.write(f"polycotype: invalid input: {exc}\n")
        return 2

    report = {
        "schemaVersion": SCHEMA_VERSION,
        "command": args.command,
        "config": _resolved_config(args),
        "result": result,
        "pass": passed,
        "generatedAt": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    if "space" in vars(args) and args.command != "witness":
        report["spaceCotype"] = known_cotype(parse_space(args.space)).to_json()
    text = json.dumps(_clean(report), indent=2) + "\n"
    try:
        if args.output == "-":
            stdout.write(text)
        else:
            _atomic_write(args.output, text)
        if args.csv and table is not None:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(table[0])
            w.writerows(_clean(list(table[1])))
            _atomic_write(args.csv, buf.getvalue())
    except OSError as exc:
        sys.stderr.write(f"polycotype: I/O error: {exc}\n")
        return 2
    return 1 if passed is False else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
