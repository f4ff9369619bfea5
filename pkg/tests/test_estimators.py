import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hardy_np.estimators import ColligationRealizer, InfeasibleError, NestInterpolator, NevanlinnaPickInterpolator
from hardy_np.exceptions import DomainError
from hardy_np.nest import FiniteNest
from hardy_np.realization import schur_from_hardy
from hardy_np.sampling import disc_monomial, disc_point


def test_pick_interpolator():
    z = np.array([0, 0.5, -0.3j])
    w = z**2
    est = NevanlinnaPickInterpolator().fit(z, w)
    assert np.allclose(est.predict(z), w, atol=1e-9)
    assert est.interpolation_error_ <= 1e-9
    assert abs(est.predict(0.7)[0]) <= 1 + 1e-9
    with pytest.raises(InfeasibleError) as info:
        NevanlinnaPickInterpolator().fit([0], [2])
    assert info.value.certificate is not None
    with pytest.raises(NotFittedError):
        NevanlinnaPickInterpolator().predict([0])


def test_params_and_clone():
    est = NevanlinnaPickInterpolator(tol=1e-6)
    assert est.get_params() == {"tol": 1e-6, "boundary": 1e-7}
    assert clone(est.set_params(boundary=1e-5)).boundary == 1e-5
    nest = FiniteNest(2, (1,))
    assert clone(NestInterpolator(nest, vector=True)).get_params()["vector"]


def test_colligation_realizer():
    pts = [disc_point(t) for t in (0, 0.3, 0.6j)]
    samples = schur_from_hardy(disc_monomial(1), pts)
    est = ColligationRealizer().fit(samples.points, samples.values)
    out = est.predict([disc_point(-0.5)])
    assert out[0][0, 0] == pytest.approx(-0.5, abs=1e-9)


def test_nest_interpolator():
    nest = FiniteNest(2, (1,))
    e1 = np.array([[1.0], [0.0]])
    est = NestInterpolator(nest, vector=True).fit(e1, 0.5 * e1)
    assert np.allclose(est.predict(e1), 0.5 * e1)
    assert est.report_["norm"] <= 1 + 1e-9
    with pytest.raises(InfeasibleError):
        NestInterpolator(nest).fit(np.diag([1.0, 0.0]), np.eye(2))
    with pytest.raises(DomainError):
        NestInterpolator().fit(np.eye(2), np.eye(2))
