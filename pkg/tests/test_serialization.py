import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardy_np import serialization as ser
from hardy_np.exceptions import DomainError
from hardy_np.hardy import evaluate
from hardy_np.realization import SampledFunction, random_colligation, transfer_eval
from hardy_np.sampling import certified_polynomial, functional_quiver, random_frame, random_point, random_representation

seeds = st.integers(0, 2**32 - 1)


def test_complex_and_matrix_primitives():
    assert ser.decode_complex(2) == 2 and ser.decode_complex([1, -2]) == 1 - 2j
    a = np.array([[1 + 2j, 3], [0, -1j]])
    assert np.array_equal(ser.decode_matrix(ser.encode_matrix(a)), a)
    assert ser.decode_matrix([], (3, 0)).shape == (3, 0)
    with pytest.raises(DomainError):
        ser.decode_matrix([[1, 2], [3]])
    with pytest.raises(DomainError):
        ser.decode_matrix([[1, 2]], (2, 1))


def test_jsonable():
    out = ser.jsonable({"a": np.float64(1.5), "b": np.bool_(True), "c": np.array([1j]), "d": np.inf, 1: (np.int64(2),)})
    assert out == {"a": 1.5, "b": True, "c": [[0.0, 1.0]], "d": None, "1": [2]}


@given(seeds)
def test_frame_point_polynomial_round_trip(seed):
    rng = np.random.default_rng(seed)
    E, sigma = random_frame(rng)
    doc = {"frame": ser.encode_frame(E, sigma), **ser.encode_polynomial(certified_polynomial(rng, E, 3))}
    ser.validate(doc, "poly")
    _, sigma2, E2 = ser.decode_frame(doc["frame"])
    assert sigma2.multiplicities == sigma.multiplicities and E2.to_json() == E.to_json()
    X = ser.decode_polynomial(doc, E2)
    eta = random_point(rng, E, sigma)
    pdoc = ser.encode_point(eta)
    ser.validate(pdoc, "point")
    eta2 = ser.decode_point(pdoc, E2, sigma2)
    assert np.allclose(eta2.matrix, eta.matrix)
    assert np.allclose(ser.decode_point({"matrix": ser.encode_matrix(eta.matrix)}, E2, sigma2).matrix, eta.matrix)
    X1 = ser.decode_polynomial(doc, E)
    assert np.allclose(evaluate(X, eta2), evaluate(X1, eta))


@given(seeds)
def test_samples_and_colligation_round_trip(seed):
    rng = np.random.default_rng(seed)
    E = functional_quiver(rng)
    sigma = random_representation(rng, E.owner)
    V = random_colligation(E, sigma, (1,) * E.owner.n_blocks, rng)
    doc = ser.jsonable(ser.encode_colligation(V))
    ser.validate(doc, "colligation")
    W = ser.decode_colligation(doc)
    pts = tuple(random_point(rng, E, sigma) for _ in range(2))
    for p in pts:
        assert np.allclose(transfer_eval(V, p), transfer_eval(W, p))
    samples = SampledFunction(pts, tuple(transfer_eval(V, p) for p in pts))
    sdoc = ser.jsonable(ser.encode_samples(samples))
    ser.validate(sdoc, "samples")
    back = ser.decode_samples(sdoc)
    assert all(np.allclose(a, b) for a, b in zip(back.values, samples.values))


def test_schemas_reject_unknown_and_missing_keys():
    frame = {"algebra": {"blocks": [1]}, "representation": {"multiplicities": [1]},
             "quiver": {"arrows": [{"src": 0, "dst": 0}]}}
    ser.validate({"frame": frame, "version": 1, "kind": "dual"}, "dual")
    with pytest.raises(DomainError, match="frame"):
        ser.validate({"frame": {**frame, "extra": 1}}, "dual")
    with pytest.raises(DomainError):
        ser.validate({"frame": frame, "typo": 1}, "dual")
    with pytest.raises(DomainError):
        ser.validate({}, "dual")
    with pytest.raises(DomainError):
        ser.validate({"h": 2, "ranks": [1], "B": [[1, 2]], "X": []}, "nest_solve")
    assert ser.strip_meta({"version": 1, "kind": "x", "h": 2}) == {"h": 2}


def test_decoders_check_sizes():
    _, sigma, E = ser.decode_frame({"algebra": {"blocks": [1]}, "representation": {"multiplicities": [1]},
                                    "quiver": {"arrows": [{"src": 0, "dst": 0}]}})
    with pytest.raises(DomainError):
        ser.decode_point({"edge_blocks": []}, E, sigma)
    with pytest.raises(DomainError):
        ser.decode_point({"edge_blocks": [[[1, 2]]]}, E, sigma)
    with pytest.raises(DomainError):
        ser.decode_polynomial({"coeffs": [{"nope": [[1]]}]}, E)
