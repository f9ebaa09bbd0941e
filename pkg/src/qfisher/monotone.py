"""Standard operator monotone functions and their means.

A standard function f satisfies f(1) = 1, x f(1/x) = f(x) and is operator
monotone; each one induces a mean m_f(x, y) = y f(x / y) and, through it, a
monotone metric on density matrices.
"""

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import NegativeInput, ParamOutOfRange, ParseError

# |x - 1| below this switches removable-singularity formulas to Taylor form
GUARD_BAND = 1e-7


@dataclass(frozen=True)
class StandardFunction:
    """A standard operator monotone function.

    Parameters
    ----------
    name : str
        Identifier, also used by :func:`parse_function_spec`.
    func : callable
        Vectorised evaluator on strictly positive arrays.
    f_at_zero : float or None
        The limit f(0+) when known analytically.
    params : dict
        Family parameters (``beta`` for WYD, ``alpha`` for chi2).
    """

    name: str
    func: object = field(repr=False, compare=False)
    f_at_zero: float = None
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise NegativeInput("standard functions are defined on x >= 0")
        out = np.empty_like(x)
        pos = x > 0
        if np.any(pos):
            out[pos] = self.func(x[pos])
        if np.any(~pos):
            out[~pos] = f_zero(self)
        return out if out.ndim else float(out)

    @property
    def spec(self):
        if not self.params:
            return self.name
        return self.name.split("(")[0] + ":" + ",".join(f"{k}={v!r}" for k, v in self.params.items())


def _sld(x):
    return (1.0 + x) / 2.0


def _harmonic(x):
    return 2.0 * x / (x + 1.0)


def _geometric(x):
    return np.sqrt(x)


def _wy(x):
    return ((1.0 + np.sqrt(x)) / 2.0) ** 2


def _bkm(x):
    t = np.log(x)
    near = np.abs(x - 1.0) < GUARD_BAND
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (x - 1.0) / t
    return np.where(near, 1.0 + t / 2.0 + t * t / 6.0, out)


def _wyd_eval(beta):
    gamma = 1.0 - beta
    bg = beta * gamma
    c2 = (2.0 + bg) / 12.0

    def f(x):
        t = np.log(x)
        near = np.abs(x - 1.0) < GUARD_BAND
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = bg * (x - 1.0) ** 2 / (np.expm1(beta * t) * np.expm1(gamma * t))
        return np.where(near, 1.0 + t / 2.0 + c2 * t * t, out)

    return f


def _chi2_eval(alpha):
    def f(x):
        return 2.0 / (x ** (-alpha) + x ** (alpha - 1.0))

    return f


SLD = StandardFunction("sld", _sld, 0.5)
HARMONIC = StandardFunction("harmonic", _harmonic, 0.0)
BKM = StandardFunction("bkm", _bkm, 0.0)
GEOMETRIC = StandardFunction("geometric", _geometric, 0.0)
WY = StandardFunction("wy", _wy, 0.25)


def wyd(beta):
    """The Wigner-Yanase-Dyson family, operator monotone for 0 < beta < 2.

    ``wyd(1)`` is the logarithmic mean (BKM) as a limit.
    """
    beta = float(beta)
    if not 0.0 < beta < 2.0:
        raise ParamOutOfRange(f"wyd requires 0 < beta < 2, got {beta}")
    if beta == 1.0:
        return StandardFunction("wyd(1.0)", _bkm, 0.0, {"beta": beta})
    # f(0+) is beta(1-beta) on (0, 1) and 0 on (1, 2)
    f0 = beta * (1.0 - beta) if beta < 1.0 else 0.0
    return StandardFunction(f"wyd({beta!r})", _wyd_eval(beta), f0, {"beta": beta})


def chi2(alpha):
    """f_alpha(x) = 2 / (x^-alpha + x^(alpha-1)), standard for 0 < alpha < 1."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ParamOutOfRange(f"chi2 requires 0 < alpha < 1, got {alpha}")
    return StandardFunction(f"chi2({alpha!r})", _chi2_eval(alpha), 0.0, {"alpha": alpha})


def catalog(beta=0.3, alpha=0.5):
    """The built-in standard functions, with one WYD and one chi2 member."""
    return [SLD, HARMONIC, BKM, GEOMETRIC, WY, wyd(beta), chi2(alpha)]


_BY_NAME = {"sld": SLD, "harmonic": HARMONIC, "bkm": BKM, "geometric": GEOMETRIC, "wy": WY}
_PARAM_ALIASES = {"β": "beta", "beta": "beta", "b": "beta", "α": "alpha", "alpha": "alpha", "a": "alpha"}


def parse_function_spec(text):
    """Parse strings like ``"sld"``, ``"wyd:β=0.3"`` or ``"chi2:alpha=0.5"``.

    ``"tilde(<spec>)"`` wraps any spec with :func:`tilde_transform`.
    """
    s = text.strip()
    m = re.fullmatch(r"tilde\((.+)\)", s)
    if m:
        return tilde_transform(parse_function_spec(m.group(1)))
    if s in _BY_NAME:
        return _BY_NAME[s]
    m = re.fullmatch(r"(wyd|chi2):\s*([^=\s]+)\s*=\s*(\S+)", s)
    if not m:
        raise ParseError(f"unknown function spec {text!r}")
    family, key, value = m.groups()
    key = _PARAM_ALIASES.get(key)
    try:
        value = float(value)
    except ValueError:
        raise ParseError(f"bad parameter value in {text!r}") from None
    if family == "wyd" and key == "beta":
        return wyd(value)
    if family == "chi2" and key == "alpha":
        return chi2(value)
    raise ParseError(f"bad parameter name in {text!r}")


def _extrapolate_zero(f):
    # f(x) ~ f(0) + c x^p near 0 with unknown p: Aitken's delta-squared on a
    # geometric point sequence removes the leading power term exactly
    v1, v2, v3 = (float(v) for v in f.func(np.array([1e-6, 1e-9, 1e-12])))
    d1, d2 = v2 - v1, v3 - v2
    if d2 == d1 or abs(d2) < 1e-15 * max(1.0, abs(v3)):
        return max(v3, 0.0)
    return max(v3 - d2 * d2 / (d2 - d1), 0.0)


def f_zero(f):
    """The limit f(0+), analytic when known, otherwise extrapolated."""
    if f.f_at_zero is not None:
        return float(f.f_at_zero)
    return _extrapolate_zero(f)


def mean(f, x, y):
    """m_f(x, y) = y f(x/y), extended to zero arguments by continuity.

    Vectorised over ``x`` and ``y``. Evaluated as max * f(min/max) so the
    argument of f stays in [0, 1].
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise NegativeInput("means are defined for nonnegative arguments")
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    pos = hi > 0
    ratio = np.divide(lo, hi, out=np.zeros_like(hi), where=pos)
    ratio = np.broadcast_to(ratio, hi.shape)
    out = np.where(pos, hi * np.asarray(f.eval(ratio)), 0.0)
    return out if out.ndim else float(out)


def tilde_transform(f):
    """f~(x) = ((x + 1) - (x - 1)^2 f(0) / f(x)) / 2, standard whenever f is."""
    f0 = f_zero(f)

    def func(x):
        return 0.5 * ((x + 1.0) - (x - 1.0) ** 2 * f0 / f.func(x))

    # f~(0) = (1 - f(0)/f(0)) / 2 when f(0) > 0, else 1/2
    return StandardFunction(f"tilde({f.spec})", func, 0.0 if f0 > 0 else 0.5)


@dataclass(frozen=True)
class StandardnessReport:
    normalization_ok: bool
    symmetry_ok: bool
    bounds_ok: bool
    matrix_monotone_ok: bool
    worst_violation: float
    violations: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.normalization_ok and self.symmetry_ok and self.bounds_ok and self.matrix_monotone_ok


def _matrix_function(f, M):
    w, U = np.linalg.eigh(M)
    return (U * f.eval(np.clip(w, 0.0, None))) @ U.conj().T


def _random_pd(rng, n):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, _ = np.linalg.qr(G)
    w = 10.0 ** rng.uniform(-2, 2, n)
    return (Q * w) @ Q.conj().T


def check_standard(f, n_samples=200, seed=0, tol=1e-10, tol_norm=1e-12, tol_monotone=1e-8):
    """Numerically certify that ``f`` is a standard operator monotone function.

    Symmetry and the harmonic/arithmetic bounds are checked at log-uniform
    points of [1e-4, 1e4] with tolerances relative to max(1, f(x)). Matrix
    monotonicity is sampled on 2x2 pairs A <= B = A + P with P >= 0.
    """
    if n_samples < 1:
        raise ParamOutOfRange("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    x = 10.0 ** rng.uniform(-4, 4, n_samples)
    fx = np.asarray(f.eval(x), dtype=float)
    scale = np.maximum(1.0, np.abs(fx))

    norm_v = abs(float(f.eval(1.0)) - 1.0)
    sym_v = float(np.max(np.abs(x * f.eval(1.0 / x) - fx) / scale))
    lower = 2.0 * x / (x + 1.0)
    upper = (1.0 + x) / 2.0
    bound_v = float(np.max(np.maximum(lower - fx, fx - upper) / scale))
    bound_v = max(bound_v, 0.0)

    mono_v = 0.0
    for _ in range(n_samples):
        A = _random_pd(rng, 2)
        G = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        B = A + G @ G.conj().T
        diff = _matrix_function(f, B) - _matrix_function(f, A)
        mono_v = max(mono_v, -float(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))[0]))

    violations = {"normalization": norm_v, "symmetry": sym_v, "bounds": bound_v, "matrix_monotone": mono_v}
    tolerances = {"normalization": tol_norm, "symmetry": tol, "bounds": tol, "matrix_monotone": tol_monotone}
    return StandardnessReport(
        normalization_ok=norm_v <= tol_norm,
        symmetry_ok=sym_v <= tol,
        bounds_ok=bound_v <= tol,
        matrix_monotone_ok=mono_v <= tol_monotone,
        worst_violation=max(violations.values()),
        violations=violations,
        tolerances=tolerances,
    )

