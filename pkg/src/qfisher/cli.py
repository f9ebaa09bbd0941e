"""Command line front end.

Every subcommand prints one JSON report on stdout::

    {"command": ..., "inputs_digest": ..., "results": {...},
     "certificates": [{"name", "passed", "worst_violation", "tolerance"}, ...]}

Exit status is 0 on success, 2 if any certificate failed and 1 on input
errors (the report then carries an ``error`` object with a stable code).
"""

import argparse
import hashlib
import math
import sys

import numpy as np

from . import channels as chn
from . import io
from . import measurement as meas
from . import metrics as mt
from .errors import BadFlag, ParseError, QFisherError
from .matrix_core import as_hermitian, validate_density, validate_positive
from .monotone import catalog, check_standard, f_zero, parse_function_spec
from .verify import Certificate, check_monotonicity, verify_all

EXIT_OK, EXIT_INPUT, EXIT_CERT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadFlag(message)


# -- output -------------------------------------------------------------------


def _fmt_float(x):
    if not math.isfinite(x):
        return "null"
    s = format(x + 0.0, ".17g")  # folds -0.0 into 0.0
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent=0):
    """Deterministic JSON with floats at 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_str(k)}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([float(obj.real), float(obj.imag)])
    return _str(str(obj))


def _str(s):
    import json

    return json.dumps(s, ensure_ascii=False)


def _real_matrix(M):
    return [[float(v) for v in row] for row in np.asarray(M, dtype=float)]


def _cert_json(c):
    return {
        "name": c.name,
        "passed": bool(c.passed),
        "worst_violation": float(c.worst_violation),
        "tolerance": float(c.tolerance),
    }


# -- inputs -------------------------------------------------------------------


FILE_FLAGS = ("state", "state2", "tangent", "tangent2", "family", "fd_family", "channel", "povm", "estimators")


def _digest(command, argv, args):
    h = hashlib.sha256()
    h.update(command.encode())
    for a in argv:
        h.update(b"\0" + a.encode())
    for flag in FILE_FLAGS:
        path = getattr(args, flag, None)
        if path and not (flag == "estimators" and path == "auto"):
            try:
                with open(path, "rb") as fh:
                    h.update(b"\1" + fh.read())
            except OSError as exc:
                raise ParseError(f"cannot read {path}: {exc}") from None
    return h.hexdigest()


def _need(args, name):
    value = getattr(args, name, None)
    if value is None:
        raise BadFlag(f"--{name.replace('_', '-')} is required for this command")
    return value


def _matrix(args, name):
    return io.matrix_from_json(io.load_json(_need(args, name)))


def _state(args, name="state"):
    return validate_density(_matrix(args, name))


def _func(args, default=None):
    if args.f is None:
        if default is None:
            raise BadFlag("--f is required for this command")
        return default
    return parse_function_spec(args.f)


def _family(args):
    if args.fd_family:
        fam, h = io.family_from_samples(io.load_json(args.fd_family))
        return fam, {"fd_step": h}
    return io.family_from_json(io.load_json(_need(args, "family"))), {}


def _tol(args, default):
    return default if args.tol is None else args.tol


def _b_function(text):
    """b(x) from 'zero', 'const:v', 'inv:k' (k/x)."""
    kind, _, value = text.partition(":")
    try:
        v = float(value) if value else 0.0
    except ValueError:
        raise ParseError(f"bad --b value {text!r}") from None
    if kind == "zero":
        return lambda x: 0.0
    if kind == "const":
        return lambda x: v
    if kind == "inv":
        return lambda x: v / x
    raise ParseError(f"unknown --b form {text!r}; use zero, const:v or inv:k")


# -- commands -----------------------------------------------------------------


def cmd_metric(args):
    f = _func(args)
    D = validate_positive(_matrix(args, "state"))
    A = _matrix(args, "tangent")
    B = _matrix(args, "tangent2") if args.tangent2 else None
    return {"gamma": mt.fisher_metric(f, D, A, B)}, []


def cmd_cov(args):
    f = _func(args)
    D = _state(args)
    A = _matrix(args, "tangent")
    if args.tangent2:
        return {"covariance": mt.covariance(f, D, A, _matrix(args, "tangent2"))}, []
    return {"variance": mt.covariance(f, D, A, A)}, []


def cmd_qfim(args):
    f = _func(args)
    fam, extra = _family(args)
    J = mt.qfim(f, fam)
    L = mt.score_operators(f, fam)
    min_eig = float(np.linalg.eigvalsh(J)[0])
    results = {"qfim": _real_matrix(J), "score_operators": [io.matrix_to_json(x) for x in L], **extra}
    return results, [Certificate("qfim_psd", max(-min_eig, 0.0), _tol(args, 1e-9))]


def cmd_crlb(args):
    f = _func(args)
    fam, extra = _family(args)
    spec = args.estimators or "auto"
    if spec == "auto":
        est = mt.unbiased_estimators(f, fam, perturbation=args.perturb, seed=args.seed)
    else:
        obj = io.load_json(spec)
        try:
            est = [io.matrix_from_json(m) for m in obj["estimators"]]
        except (KeyError, TypeError):
            raise ParseError("estimators file needs an 'estimators' list") from None
    tol = _tol(args, 1e-8)
    cert = mt.cramer_rao_certificate(f, fam, est, tol=tol)
    results = {
        "block": _real_matrix(cert.block),
        "covariance": _real_matrix(cert.covariance),
        "fisher": _real_matrix(cert.fisher),
        "gap_min_eig": cert.gap_min_eig,
        "block_min_eig": cert.block_min_eig,
        **extra,
    }
    certs = [
        Certificate("block_psd", max(-cert.block_min_eig, 0.0), tol),
        Certificate("cramer_rao_gap", max(-cert.gap_min_eig, 0.0), tol),
    ]
    return results, certs


def cmd_skew(args):
    f = _func(args)
    D = _state(args)
    A = as_hermitian(_matrix(args, "tangent"))
    results = {"skew": mt.skew_information(f, D, A), "f_zero": f_zero(f)}
    beta = f.params.get("beta")
    if beta is not None and 0 < beta < 1:
        results["wyd_skew"] = mt.wyd_skew(beta, D, A)
    certs = []
    if abs(np.trace(D.matrix @ A).real) <= 1e-10:
        lhs, rhs = mt.skew_vs_covariance_identity(f, D, A)
        results["identity_rhs"] = rhs
        certs.append(Certificate("skew_covariance_identity", abs(lhs - rhs), _tol(args, 1e-8)))
    return results, certs


def cmd_chi2(args):
    if args.alpha is not None:
        alpha = args.alpha
    else:
        alpha = _func(args).params.get("alpha")
        if alpha is None:
            raise BadFlag("chi2 needs --alpha or --f chi2:alpha=...")
    rho = _state(args)
    sigma = _state(args, "state2")
    val = mt.chi2_divergence(alpha, rho, sigma)
    as_metric = mt.chi2_as_metric(alpha, rho, sigma)
    certs = [Certificate("chi2_metric_cross_check", abs(val - as_metric), _tol(args, 1e-8))]
    return {"chi2": val, "metric_form": as_metric, "alpha": alpha}, certs


def cmd_extended(args):
    f = _func(args)
    rho = validate_positive(_matrix(args, "state"))
    A = _matrix(args, "tangent")
    B = _matrix(args, "tangent2") if args.tangent2 else None
    spec = mt.ExtendedMetricSpec(f, _b_function(args.b), args.c)
    return {"K": mt.extended_metric(spec, rho, A, B)}, []


def cmd_optimal_measurement(args):
    D = _state(args)
    B = _matrix(args, "tangent")
    C = meas.sld_optimal_observable(D, B)
    povm = meas.optimal_measurement(D, B)
    bound = mt.fisher_metric(parse_function_spec("sld"), D, B)
    attained = float(meas.classical_fisher(D, [B], povm)[0, 0])
    results = {
        "observable": io.matrix_to_json(C),
        "povm": io.povm_to_json(povm),
        "bound": bound,
        "attained": attained,
    }
    return results, [Certificate("attains_sld_bound", abs(bound - attained), _tol(args, 1e-8))]


def cmd_supremum(args):
    D = _state(args)
    B = _matrix(args, "tangent")
    tol = _tol(args, 1e-8)
    n = 200 if args.n is None else args.n
    cert = meas.supremum_certificate(D, B, n, args.seed, tol)
    results = {"bound": cert.bound, "attained": cert.attained, "max_random": cert.max_random}
    certs = [
        Certificate("attained_reaches_bound", max(cert.bound - cert.attained, 0.0), tol),
        Certificate("random_povms_below_bound", max(cert.max_random - cert.bound, 0.0), tol),
    ]
    return results, certs


def cmd_monotonicity(args):
    tol = _tol(args, 1e-8)
    if args.channel:
        f = _func(args)
        ch = io.channel_from_json(io.load_json(args.channel))
        if args.family or args.fd_family:
            fam, extra = _family(args)
            gap = chn.qfim_monotonicity_gap(f, ch, fam)
            min_eig = float(np.linalg.eigvalsh(0.5 * (gap + gap.T))[0])
            results = {"qfim_gap": _real_matrix(gap), "min_eig": min_eig, **extra}
            return results, [Certificate("qfim_monotonicity", max(-min_eig, 0.0), tol)]
        D = _state(args)
        A = as_hermitian(_matrix(args, "tangent"))
        gap = chn.metric_monotonicity_gap(f, ch, D, A)
        results = {"gap": gap, "masked_weight": chn.image_masked_weight(f, ch, D, A)}
        return results, [Certificate("metric_monotonicity", max(-gap, 0.0), tol)]
    fs = catalog() if args.f is None else [_func(args)]
    n = 100 if args.n is None else args.n
    certs = check_monotonicity(n, max(1, n // 2), args.seed, fs=fs)
    for c in certs:
        c.tolerance = tol
        c.passed = c.worst_violation <= tol
    return {"functions": [f.spec for f in fs], "triples_per_function": n}, certs


def cmd_check_f(args):
    f = _func(args)
    n = 200 if args.n is None else args.n
    rep = check_standard(f, n, args.seed)
    certs = [Certificate(k, rep.violations[k], rep.tolerances[k]) for k in rep.violations]
    return {"function": f.spec, "f_zero": f_zero(f), "worst_violation": rep.worst_violation}, certs


def cmd_verify_all(args):
    certs = verify_all(args.seed, args.scale)
    return {"seed": args.seed, "scale": args.scale, "n_certificates": len(certs)}, certs


COMMANDS = {
    "metric": cmd_metric,
    "cov": cmd_cov,
    "qfim": cmd_qfim,
    "crlb": cmd_crlb,
    "skew": cmd_skew,
    "chi2": cmd_chi2,
    "extended": cmd_extended,
    "optimal-measurement": cmd_optimal_measurement,
    "supremum": cmd_supremum,
    "monotonicity": cmd_monotonicity,
    "check-f": cmd_check_f,
    "verify-all": cmd_verify_all,
}


def build_parser():
    parser = _Parser(prog="qfisher", description="Monotone quantum Fisher information toolkit.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--f", help='standard function, e.g. "sld", "wyd:β=0.3", "chi2:α=0.5"')
        for flag in ("state", "state2", "tangent", "tangent2", "family", "channel", "povm"):
            p.add_argument(f"--{flag}", metavar="PATH")
        p.add_argument("--fd-family", metavar="PATH", help="sampled states for central differences")
        p.add_argument("--estimators", metavar="PATH|auto")
        p.add_argument("--perturb", type=float, default=0.0, help="noise on auto estimators")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--n", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--b", default="zero", help="b(x) for extended metrics: zero | const:v | inv:k")
        p.add_argument("--c", type=float, default=1.0)
        p.add_argument("--scale", type=float, default=1.0, help="instance-count scale for verify-all")
    return parser


def run(argv=None, out=None):
    """Run one command; returns the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    out = sys.stdout if out is None else out
    command = argv[0] if argv else ""
    report = {"command": command}
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise BadFlag("no subcommand given")
        if args.seed < 0 or args.seed >= 2**64:
            raise BadFlag("--seed must be an unsigned 64-bit integer")
        report["inputs_digest"] = _digest(args.command, argv, args)
        results, certs = COMMANDS[args.command](args)
    except QFisherError as exc:
        report["error"] = {"code": exc.code, "message": str(exc)}
        out.write(dumps(report) + "\n")
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report["results"] = results
    report["certificates"] = [_cert_json(c) for c in certs]
    out.write(dumps(report) + "\n")
    return EXIT_OK if all(c.passed for c in certs) else EXIT_CERT


def main():
    sys.exit(run())
