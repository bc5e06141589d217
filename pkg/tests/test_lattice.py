import numpy as np
import pytest

from orbitgauge.group import IDENTITY, quat_inv, quat_mul, to_matrix
from orbitgauge.lattice import (
    EdgeId,
    FieldFormatError,
    GaugeField,
    GaugeTransform,
    Lattice,
    apply_gauge,
    field_io_read,
    field_io_write,
    format_field,
    parse_field,
    plaquette_csv,
    plaquette_holonomy,
    plaquette_trace,
    wilson_terms,
)


@pytest.mark.parametrize("n1", range(2, 7))
@pytest.mark.parametrize("n2", range(2, 7))
def test_counts(n1, n2):
    lat = Lattice(n1, n2)
    assert lat.n_sites == n1 * n2
    assert lat.n_edges == len(lat.edges) == n2 * (n1 - 1) + n1 * (n2 - 1)
    assert len(lat.tree_edges()) == lat.n_sites - 1
    assert len(lat.free_edges()) == lat.n_edges - lat.n_sites + 1
    for e in lat.edges:
        assert lat.site_index[e.end] is not None


def test_invalid_extent():
    with pytest.raises(ValueError):
        Lattice(0, 3)


def test_apply_identity_transform():
    lat = Lattice(3, 2)
    U = GaugeField.random(lat, 1)
    assert apply_gauge(U, GaugeTransform.identity(lat)).allclose(U, 1e-15)


def test_identity_field_becomes_pure_gauge():
    lat = Lattice(3, 3)
    K = GaugeTransform.random(lat, 2)
    V = apply_gauge(GaugeField.identity(lat), K)
    for e in lat.edges:
        assert np.allclose(V[e], quat_mul(quat_inv(K[e.end]), K[e.site]), atol=1e-15)


def test_composition_and_inverse():
    lat = Lattice(3, 3)
    rng = np.random.default_rng(3)
    U = GaugeField.random(lat, rng)
    K, L = GaugeTransform.random(lat, rng), GaugeTransform.random(lat, rng)
    assert apply_gauge(apply_gauge(U, K), L).allclose(apply_gauge(U, K * L), 1e-14)
    assert apply_gauge(apply_gauge(U, K), K.inverse()).allclose(U, 1e-12)


def test_plaquette_invariance():
    lat = Lattice(3, 3)
    rng = np.random.default_rng(4)
    for _ in range(100):
        U = GaugeField.random(lat, rng)
        V = apply_gauge(U, GaugeTransform.random(lat, rng))
        for c in lat.plaquette_corners():
            assert abs(plaquette_trace(U, c) - plaquette_trace(V, c)) <= 1e-12


def test_plaquette_values():
    lat = Lattice(2, 2)
    assert plaquette_trace(GaugeField.identity(lat), (0, 0)) == 2.0
    U = GaugeField.random(lat, 5)
    m = {e: to_matrix(U[e]) for e in lat.edges}
    hol = (
        np.linalg.inv(m[EdgeId(0, 0, 2)])
        @ np.linalg.inv(m[EdgeId(0, 1, 1)])
        @ m[EdgeId(1, 0, 2)]
        @ m[EdgeId(0, 0, 1)]
    )
    assert plaquette_trace(U, (0, 0)) == pytest.approx(np.trace(hol).real, abs=1e-14)
    assert plaquette_trace(U, (0, 0)) == pytest.approx(2 * plaquette_holonomy(U, (0, 0))[0])
    with pytest.raises(ValueError):
        plaquette_trace(U, (1, 0))


def test_wilson_terms():
    lat = Lattice(3, 2)
    rng = np.random.default_rng(6)
    U = GaugeField.random(lat, rng)
    one = GaugeTransform.identity(lat)
    assert wilson_terms(U, U, one)[0] == pytest.approx(0.0, abs=1e-14)
    I = GaugeField.identity(lat)
    assert wilson_terms(I, I, one) == (0.0, 0.0)
    for _ in range(20):
        V = GaugeField.random(lat, rng)
        l_st, l_ss = wilson_terms(U, V, GaugeTransform.random(lat, rng))
        assert l_st >= 0 and l_ss >= 0


def test_io_round_trip(tmp_path):
    U = GaugeField.random(Lattice(3, 4), 8)
    path = tmp_path / "u.field"
    field_io_write(path, U, comment="hello\nworld")
    V = field_io_read(path)
    assert np.array_equal(U.links, V.links)
    assert [p.name for p in tmp_path.iterdir()] == ["u.field"]


def test_io_rejects_bad_norm():
    text = format_field(GaugeField.identity(Lattice(2, 2))).replace("0 0 1 1 0 0 0", "0 0 1 1.1 0 0 0")
    with pytest.raises(FieldFormatError, match="norm"):
        parse_field(text)


def test_io_rejects_missing_edge():
    lines = format_field(GaugeField.identity(Lattice(3, 3))).splitlines()
    with pytest.raises(FieldFormatError, match="expected 12"):
        parse_field("\n".join(lines[:-1]))


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda ls: ["orbitgauge v2 2 2"] + ls[1:], "header"),
        (lambda ls: ls[:1] + [ls[1]] + ls[1:-1], "duplicate"),
        (lambda ls: ls[:-1] + ["5 5 1 1 0 0 0"], "not on"),
        (lambda ls: ls[:-1] + ["1 0 2 1 0 0"], "columns"),
    ],
)
def test_io_malformed(mutate, message):
    lines = format_field(GaugeField.identity(Lattice(2, 2))).splitlines()
    with pytest.raises(FieldFormatError, match=message):
        parse_field("\n".join(mutate(lines)))


def test_plaquette_csv():
    text = plaquette_csv(GaugeField.identity(Lattice(3, 2)), comment="c")
    assert text.splitlines()[:3] == ["# c", "x1,x2,trace", "0,0,2"]


def test_field_is_immutable():
    U = GaugeField.identity(Lattice(2, 2))
    with pytest.raises(ValueError):
        U.links[0, 0] = 3.0
    assert np.array_equal(U[(0, 0, 1)], IDENTITY)
