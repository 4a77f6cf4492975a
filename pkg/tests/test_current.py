import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.interpolate import RegularGridInterpolator

from auvplan.current import (CurrentField, Vortex, divergence, field_from_vortices, generate_field,
                             load_field, sample_components, sample_velocity, save_field,
                             vortex_velocity)


def polar_oracle(vortex, x, y):
    """Tangential speed from the profile, pointed counter-clockwise."""
    r = math.hypot(x - vortex.x, y - vortex.y)
    if r == 0:
        return 0.0, 0.0
    vt = vortex.circulation / (2 * math.pi * r) * (1 - math.exp(-r * r / (2 * vortex.core_radius**2)))
    phi = math.atan2(y - vortex.y, x - vortex.x)
    return -vt * math.sin(phi), vt * math.cos(phi)


def test_vortex_zero_at_centre():
    assert vortex_velocity(Vortex(3.0, 4.0, 100.0, 1.0), 3.0, 4.0) == (0.0, 0.0)


def test_vortex_unit_example():
    u, v = vortex_velocity(Vortex(0.0, 0.0, 2 * math.pi, 1.0), 1.0, 0.0)
    assert u == pytest.approx(0.0, abs=1e-15)
    assert math.hypot(u, v) == pytest.approx(1 - math.exp(-0.5), rel=1e-12)
    assert math.hypot(u, v) == pytest.approx(0.39347, abs=1e-5)
    assert v > 0  # counter-clockwise


@given(st.floats(-5000, 5000), st.floats(-5000, 5000), st.floats(-500, 500), st.floats(50, 900))
def test_vortex_matches_polar_form_and_flips_with_sign(x, y, gamma, rc):
    vx = Vortex(10.0, -20.0, gamma, rc)
    u, v = vortex_velocity(vx, x, y)
    ou, ov = polar_oracle(vx, x, y)
    assert u == pytest.approx(ou, rel=1e-9, abs=1e-15)
    assert v == pytest.approx(ov, rel=1e-9, abs=1e-15)
    nu, nv = vortex_velocity(Vortex(10.0, -20.0, -gamma, rc), x, y)
    assert (nu, nv) == (-u, -v)


def test_vortex_tangential():
    vx = Vortex(0.0, 0.0, 300.0, 400.0)
    rng = np.random.default_rng(0)
    x, y = rng.uniform(-3000, 3000, (2, 200))
    u, v = vortex_velocity(vx, x, y)
    np.testing.assert_allclose(u * x + v * y, 0.0, atol=1e-12)


def test_vortex_validation():
    with pytest.raises(ValueError):
        Vortex(0, 0, 1.0, 0.0)
    with pytest.raises(ValueError):
        Vortex(0, 0, float("inf"), 1.0)


def test_empty_field_is_zero():
    f = generate_field(n_vortices=0, seed=5)
    assert not f.u.any() and not f.v.any()
    assert f.vortices == ()


def test_default_field():
    f = generate_field(seed=0)
    assert len(f.vortices) == 11
    assert f.shape == (100, 100)
    assert np.isfinite(f.u).all() and np.isfinite(f.v).all()
    for vx in f.vortices:
        assert 0 <= vx.x <= 10000 and 0 <= vx.y <= 10000
        assert 50 <= abs(vx.circulation) <= 500
        assert 200 <= vx.core_radius <= 800


def test_generate_is_deterministic_and_seed_sensitive():
    a, b, c = generate_field(seed=4), generate_field(seed=4), generate_field(seed=5)
    np.testing.assert_array_equal(a.u, b.u)
    assert not np.array_equal(a.u, c.u)


def test_grid_matches_vortex_sum():
    f = generate_field(n_vortices=3, grid_shape=(20, 30), extent=(4000, 6000), seed=9)
    xs, ys = f.cell_centres()
    for ix, iy in [(0, 0), (7, 13), (19, 29)]:
        ou = sum(polar_oracle(vx, xs[ix], ys[iy])[0] for vx in f.vortices)
        ov = sum(polar_oracle(vx, xs[ix], ys[iy])[1] for vx in f.vortices)
        assert f.u[ix, iy] == pytest.approx(ou, rel=1e-9, abs=1e-15)
        assert f.v[ix, iy] == pytest.approx(ov, rel=1e-9, abs=1e-15)


def test_single_central_vortex_symmetry():
    f = field_from_vortices([Vortex(5000.0, 5000.0, 400.0, 500.0)])
    s = sample_velocity(f, 5000.0, 5000.0)
    assert s.magnitude < 1e-15
    np.testing.assert_allclose(f.u, -f.u[::-1, ::-1], atol=1e-15)
    np.testing.assert_allclose(f.v, -f.v[::-1, ::-1], atol=1e-15)


def test_superposition_exact():
    a = Vortex(3000.0, 4000.0, 250.0, 300.0)
    b = Vortex(6000.0, 7000.0, -420.0, 650.0)
    fa, fb, fab = (field_from_vortices(v) for v in ([a], [b], [a, b]))
    np.testing.assert_array_equal(fab.u, fa.u + fb.u)
    np.testing.assert_array_equal(fab.v, fa.v + fb.v)


def test_divergence_small():
    for seed in range(3):
        assert np.abs(divergence(generate_field(seed=seed))).max() < 1e-3


def test_sample_at_node_is_stored_value():
    f = generate_field(seed=1)
    xs, ys = f.cell_centres()
    s = sample_velocity(f, xs[17], ys[42])
    assert (s.v_cx, s.v_cy) == (f.u[17, 42], f.v[17, 42])


def test_sample_midpoint():
    u = np.zeros((4, 4))
    v = np.zeros((4, 4))
    u[1, 2], v[2, 2] = 1.0, 1.0
    f = CurrentField(u, v, (4.0, 4.0))
    s = sample_velocity(f, 2.0, 2.5)  # halfway between centres (1.5, 2.5) and (2.5, 2.5)
    assert (s.v_cx, s.v_cy) == (0.5, 0.5)


def test_sample_zero_field():
    s = sample_velocity(CurrentField.zeros(), 1234.0, 99.0)
    assert (s.v_cx, s.v_cy, s.magnitude) == (0.0, 0.0, 0.0)


def test_sample_against_scipy_interpolator():
    f = generate_field(seed=6, grid_shape=(40, 50), extent=(4000, 5000))
    xs, ys = f.cell_centres()
    rng = np.random.default_rng(2)
    x = rng.uniform(-500, 4500, 500)
    y = rng.uniform(-500, 5500, 500)
    pts = np.column_stack([np.clip(x, xs[0], xs[-1]), np.clip(y, ys[0], ys[-1])])
    u, v = sample_components(f, x, y)
    np.testing.assert_allclose(u, RegularGridInterpolator((xs, ys), f.u)(pts), rtol=1e-10, atol=1e-14)
    np.testing.assert_allclose(v, RegularGridInterpolator((xs, ys), f.v)(pts), rtol=1e-10, atol=1e-14)


def test_sample_heading_consistent():
    f = generate_field(seed=3)
    s = sample_velocity(f, 4100.0, 5300.0)
    assert s.magnitude * math.cos(s.heading) == pytest.approx(s.v_cx, abs=1e-15)
    assert s.magnitude * math.sin(s.heading) == pytest.approx(s.v_cy, abs=1e-15)


def test_sample_continuous_across_cell_boundary():
    f = generate_field(seed=8)
    dx, _ = f.spacing
    x = 3 * dx + 0.5 * dx  # a cell centre column, where the interpolation stencil switches
    left = sample_components(f, x - 1e-9, 2222.0)
    right = sample_components(f, x + 1e-9, 2222.0)
    assert left[0] == pytest.approx(right[0], abs=1e-10)
    assert left[1] == pytest.approx(right[1], abs=1e-10)


def test_field_round_trip(tmp_path):
    f = generate_field(seed=12, grid_shape=(10, 12))
    save_field(f, tmp_path / "field.json", tmp_path / "field.csv", config={"a": 1})
    g = load_field(tmp_path / "field.json")
    np.testing.assert_array_equal(f.u, g.u)
    np.testing.assert_array_equal(f.v, g.v)
    assert g.vortices == f.vortices and g.extent == f.extent and g.seed == 12
    assert (tmp_path / "field.csv").read_text().startswith("# config:")


def test_load_field_rejects_short_csv(tmp_path):
    f = generate_field(seed=1, grid_shape=(5, 5))
    save_field(f, tmp_path / "f.json")
    csv_path = tmp_path / "f.csv"
    csv_path.write_text("\n".join(csv_path.read_text().splitlines()[:-1]) + "\n")
    with pytest.raises(ValueError):
        load_field(tmp_path / "f.json")


def test_field_validation():
    with pytest.raises(ValueError):
        CurrentField(np.zeros((3, 3)), np.zeros((3, 4)), (1.0, 1.0))
    with pytest.raises(ValueError):
        CurrentField(np.full((3, 3), np.nan), np.zeros((3, 3)), (1.0, 1.0))
    with pytest.raises(ValueError):
        generate_field(n_vortices=-1)
