import json

import numpy as np
import pytest

from qfisher import io
from qfisher.channels import depolarizing, random_channel
from qfisher.errors import DimMismatch, InvalidPovm, NotTracePreserving, ParseError
from qfisher.measurement import random_povm
from qfisher.sampling import random_family, random_hermitian


def test_matrix_round_trip(rng):
    M = random_hermitian(3, rng)
    obj = json.loads(json.dumps(io.matrix_to_json(M)))
    assert obj["dim"] == 3
    np.testing.assert_array_equal(io.matrix_from_json(obj), M)


def test_rectangular_round_trip(rng):
    M = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    obj = io.matrix_to_json(M)
    assert (obj["rows"], obj["cols"]) == (2, 3)
    np.testing.assert_array_equal(io.matrix_from_json(obj), M)


@pytest.mark.parametrize(
    "obj, err",
    [
        ({}, ParseError),
        ({"entries": []}, ParseError),
        ({"entries": [[[1, 0], [0]]]}, ParseError),
        ({"entries": [[[1, 0]], [[0, 0], [1, 0]]]}, ParseError),
        ({"entries": [[["a", 0]]]}, ParseError),
        ({"entries": [[[True, 0]]]}, ParseError),
        ({"dim": 3, "entries": [[[1, 0]]]}, DimMismatch),
    ],
)
def test_bad_matrices(obj, err):
    with pytest.raises(err):
        io.matrix_from_json(obj)


def test_nan_rejected(tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{"dim": 1, "entries": [[[NaN, 0]]]}')
    with pytest.raises(ParseError):
        io.load_json(p)


def test_bad_json(tmp_path):
    p = tmp_path / "m.json"
    p.write_text("{not json")
    with pytest.raises(ParseError):
        io.load_json(p)


def test_channel_round_trip():
    ch = random_channel(3, 2, 2, seed=1)
    back = io.channel_from_json(json.loads(json.dumps(io.channel_to_json(ch))))
    for a, b in zip(ch.kraus_ops, back.kraus_ops):
        np.testing.assert_array_equal(a, b)


def test_channel_declared_dims():
    obj = io.channel_to_json(depolarizing(0.2))
    obj["n_out"] = 3
    with pytest.raises(DimMismatch):
        io.channel_from_json(obj)


def test_channel_not_tp():
    obj = {"kraus": [io.matrix_to_json(0.5 * np.eye(2))]}
    with pytest.raises(NotTracePreserving):
        io.channel_from_json(obj)


def test_povm_round_trip():
    P = random_povm(2, 3, seed=0)
    back = io.povm_from_json(io.povm_to_json(P))
    assert len(back) == 3


def test_povm_invalid():
    with pytest.raises(InvalidPovm):
        io.povm_from_json({"effects": [io.matrix_to_json(np.eye(2) * 0.5)]})


def test_family_round_trip(rng):
    fam = random_family(3, 2, rng)
    back = io.family_from_json(io.family_to_json(fam))
    np.testing.assert_array_equal(back.base.matrix, fam.base.matrix)
    assert back.m == 2


def test_family_missing_fields():
    with pytest.raises(ParseError):
        io.family_from_json({"base": io.matrix_to_json(np.eye(2) / 2)})


def test_family_from_samples():
    # rho(theta) = diag(0.5 + theta, 0.5 - theta) sampled at +-h
    h = 1e-3
    mk = lambda t: io.matrix_to_json(np.diag([0.5 + t, 0.5 - t]))
    obj = {"base": mk(0.0), "h": h, "plus": [mk(h)], "minus": [mk(-h)]}
    fam, step = io.family_from_samples(obj)
    assert step == h
    np.testing.assert_allclose(fam.matrices[0], np.diag([1.0, -1.0]), atol=1e-12)


def test_family_from_samples_bad():
    mk = io.matrix_to_json(np.eye(2) / 2)
    with pytest.raises(ParseError):
        io.family_from_samples({"base": mk, "h": 0.0, "plus": [mk], "minus": [mk]})
    with pytest.raises(ParseError):
        io.family_from_samples({"base": mk, "h": 0.1, "plus": [mk], "minus": []})
