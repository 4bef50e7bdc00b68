import math

import numpy as np
import pytest

from inftyspec import domains as dm
from inftyspec import eigenfunc as ef
from inftyspec import spectra as sp
from inftyspec.errors import NotCertifiedError, ParameterError
from inftyspec.raster import rasterize

H8 = 2.0**-8


def test_cone_values():
    c = ef.cone((0.0, 0.0), 1.0)
    assert c((0.0, 0.0)) == 1.0
    assert c((0.6, 0.8)) == pytest.approx(0.0, abs=1e-15)
    assert ef.cone((0.0, 0.0), 2.0)((1.0, 0.0)) == 0.5
    assert c.lipschitz == 1.0
    with pytest.raises(ParameterError):
        ef.cone((0, 0), 0.0)


def test_ball_eigenfunction_is_cone():
    r = rasterize(dm.ball(1.0), H8)
    u = ef.distance_eigenfunction(r)
    radius = np.linalg.norm(r.centers(), axis=-1)
    err = np.abs(u.values - (1 - radius))[r.occupancy]
    assert err.max() <= 2 * H8 * math.sqrt(2)
    assert 1 - 2 * H8 <= u.max <= 1.0
    dev = ef.sup_deviation(u, ef.aligned_cone(u, 1.0), 1.0)
    assert dev.value <= 4 * H8


def test_stadium_normalization():
    spec = sp.family_member("stadium4", 10, 1.0)
    r = rasterize(spec, H8)
    u = ef.distance_eigenfunction(r)
    assert abs(u.max - 1) <= 2 * H8 / spec.params["eps"]
    assert abs(u.max - 1) <= ef.normalization_error(u)


def test_not_certified():
    with pytest.raises(NotCertifiedError):
        ef.distance_eigenfunction(rasterize(dm.annulus(1.25, 0.75), 2.0**-5))
    with pytest.raises(NotCertifiedError):
        ef.distance_eigenfunction(rasterize(dm.regular_polygon(6, 1.0), 2.0**-5))


def test_deviation_decreases_with_k():
    devs = {}
    for k in (10, 40):
        u = ef.distance_eigenfunction(rasterize(sp.family_member("stadium4", k, 1.0), H8))
        devs[k] = ef.sup_deviation(u, ef.aligned_cone(u, 1.0), 1.0)
    assert devs[10].value > 0
    assert devs[40].value / devs[10].value < 1
    js = devs[10].to_json()
    assert js["sup_deviation"] == devs[10].value and len(js["argmax_cell"]) == 2


def test_gradient_lipschitz():
    r = rasterize(sp.family_member("stadium4", 20, 1.0), 2.0**-7)
    u = ef.distance_eigenfunction(r)
    g = ef.discrete_gradient_norm(u)
    # forward differences of a 1-Lipschitz function: at most sqrt(2) per unit, scaled by lambda
    assert np.nanmax(g) <= u.lambda_D * math.sqrt(2) * (1 + 1e-12)


def test_empty_intersection():
    u = ef.distance_eigenfunction(rasterize(dm.ball(1.0), 2.0**-5))
    with pytest.raises(ParameterError):
        ef.sup_deviation(u, ef.cone((10.0, 0.0), 1.0), 1.0)


def test_deviation_field_zero_outside():
    r = rasterize(dm.ball(1.0), 2.0**-5)
    u = ef.distance_eigenfunction(r)
    f = ef.deviation_field(u, ef.aligned_cone(u, 1.0))
    assert np.all(f[~r.occupancy] == 0)
