"""JSON encodings for matrices, channels, POVMs and parameter families.

Matrix: ``{"dim": n, "entries": [[[re, im], ...], ...]}`` row-major.
Channel: ``{"n_in": n, "n_out": m, "kraus": [matrix, ...]}`` where each Kraus
operator may be rectangular (``"rows"``/``"cols"`` replace ``"dim"``).
POVM: ``{"effects": [matrix, ...]}``.
Family: ``{"base": matrix, "derivatives": [matrix, ...]}``.
Sampled family: ``{"base": matrix, "h": h, "plus": [...], "minus": [...]}``
with plus/minus holding rho(theta +/- h e_i).
"""

import json
import math

import numpy as np

from .channels import KrausChannel
from .errors import DimMismatch, ParseError
from .measurement import Povm
from .metrics import ParamFamily


def _number(x):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"expected a number, got {x!r}")
    if not math.isfinite(x):
        raise ParseError("NaN/Inf entries are not allowed")
    return float(x)


def matrix_from_json(obj):
    if not isinstance(obj, dict) or "entries" not in obj:
        raise ParseError("matrix object needs an 'entries' field")
    rows = obj["entries"]
    if not isinstance(rows, list) or not rows:
        raise ParseError("'entries' must be a non-empty list of rows")
    try:
        M = np.array(
            [[complex(_number(e[0]), _number(e[1])) for e in row] for row in rows],
            dtype=np.complex128,
        )
    except (TypeError, IndexError, KeyError) as exc:
        raise ParseError(f"malformed matrix entries: {exc}") from None
    except ValueError as exc:
        raise ParseError(f"ragged matrix rows: {exc}") from None
    if M.ndim != 2:
        raise ParseError("ragged matrix rows")
    if "dim" in obj:
        if M.shape != (obj["dim"], obj["dim"]):
            raise DimMismatch(f"declared dim {obj['dim']} but entries have shape {M.shape}")
    else:
        shape = (obj.get("rows", M.shape[0]), obj.get("cols", M.shape[1]))
        if M.shape != shape:
            raise DimMismatch(f"declared shape {shape} but entries have shape {M.shape}")
    return M


def matrix_to_json(M):
    M = np.asarray(M, dtype=np.complex128)
    entries = [[[float(z.real), float(z.imag)] for z in row] for row in M]
    if M.shape[0] == M.shape[1]:
        return {"dim": M.shape[0], "entries": entries}
    return {"rows": M.shape[0], "cols": M.shape[1], "entries": entries}


def channel_from_json(obj):
    try:
        ops = [matrix_from_json(K) for K in obj["kraus"]]
    except (KeyError, TypeError):
        raise ParseError("channel object needs a 'kraus' list") from None
    ch = KrausChannel(tuple(ops))
    if obj.get("n_in", ch.n_in) != ch.n_in or obj.get("n_out", ch.n_out) != ch.n_out:
        raise DimMismatch("declared n_in/n_out disagree with the Kraus operators")
    return ch


def channel_to_json(ch):
    return {"n_in": ch.n_in, "n_out": ch.n_out, "kraus": [matrix_to_json(K) for K in ch.kraus_ops]}


def povm_from_json(obj):
    try:
        return Povm(tuple(matrix_from_json(E) for E in obj["effects"]))
    except (KeyError, TypeError):
        raise ParseError("POVM object needs an 'effects' list") from None


def povm_to_json(povm):
    return {"effects": [matrix_to_json(E) for E in povm.effects]}


def family_from_json(obj):
    try:
        base = matrix_from_json(obj["base"])
        ders = [matrix_from_json(B) for B in obj["derivatives"]]
    except (KeyError, TypeError):
        raise ParseError("family object needs 'base' and 'derivatives'") from None
    return ParamFamily(base, ders)


def family_from_samples(obj):
    """Central differences (rho(theta + h e_i) - rho(theta - h e_i)) / 2h."""
    try:
        base = matrix_from_json(obj["base"])
        h = _number(obj["h"])
        plus = [matrix_from_json(M) for M in obj["plus"]]
        minus = [matrix_from_json(M) for M in obj["minus"]]
    except (KeyError, TypeError):
        raise ParseError("sampled family needs 'base', 'h', 'plus' and 'minus'") from None
    if len(plus) != len(minus) or h <= 0:
        raise ParseError("need matching plus/minus lists and h > 0")
    ders = []
    for P, M in zip(plus, minus):
        B = (P - M) / (2.0 * h)
        B = 0.5 * (B + B.conj().T)
        ders.append(B - np.trace(B).real / B.shape[0] * np.eye(B.shape[0]))
    return ParamFamily(base, ders), h


def family_to_json(family):
    return {
        "base": matrix_to_json(family.base.matrix),
        "derivatives": [matrix_to_json(B) for B in family.matrices],
    }


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _reject_constant(name):
    raise ParseError(f"non-finite constant {name} is not allowed")
