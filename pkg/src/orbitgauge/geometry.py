"""Euler-angle chart on the gauge-fixed slice and its Riemannian data.

Chart coordinates are the phase ``alpha`` of the diagonal last edge followed
by ``(alpha, beta, theta)`` of every other free edge (direction 2, x1 >= 1).
One chart direction, the diagonal constant gauge rotation, is redundant; it
is reported as ``constraint_direction``.

Frames.  On one link, ``-i U^-1 dU/dgamma = M[gamma, a] sigma_a / 2`` defines
the vielbein ``M`` (rows = coordinates).  Its inverse ``Y = inv(M)`` gives the
body-frame vector fields ``Y_a`` generating ``U -> U exp(i eps sigma_a / 2)``.
The electric-field operators ``l_b`` obeying ``[l_b, U] = -t_b U`` act from
the left; they differ from the body fields by the adjoint matrix and a factor
``-sqrt(2)``, which leaves every quadratic Casimir unchanged.  With this
scaling the Laplace-Beltrami operator is ``-Delta = -2 sum_r (E_r . d)^2`` up to
first-order terms, and the inverse metric is ``E^T E``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .gaugefix import FixedConfiguration, reconstruct_orbit_representative
from .group import (
    IDENTITY,
    SU_BASIS,
    adjoint,
    euler_compose,
    euler_decompose,
    exp_su2,
    quat_mul,
    to_matrix,
)
from .lattice import EdgeId, GaugeField, Lattice

SINGULAR_BETA_TOL = 1e-8
DEGENERACY_TOL = 1e-8
PINV_CUTOFF = 1e-10
FD_STEP = 1e-3
ANGLE_NAMES = ("alpha", "beta", "theta")
#: -Delta = LB_SCALE * (sigma/2-normalized sum of squares)
LB_SCALE = 2.0


class ChartSingularityError(ValueError):
    """The Euler chart degenerates (beta = 0 or pi) at the requested point."""


class StabilizerDegeneracyError(ValueError):
    """The configuration sits on (or too near) a conically-singular orbit."""


# ------------------------------------------------------------------ one edge


@dataclass(frozen=True)
class Vielbein:
    M: np.ndarray
    Minv: Optional[np.ndarray]

    @property
    def singular(self):
        return self.Minv is None


def vielbein_matrix(a):
    alpha, beta, theta = a
    sb, cb = np.sin(beta), np.cos(beta)
    st, ct = np.sin(theta), np.cos(theta)
    return np.array(
        [
            [sb * st, -sb * ct, cb],
            [ct, st, 0.0],
            [0.0, 0.0, 1.0],
        ]
    )


def printed_vielbein_matrix(a):
    """The closed form as printed in the source, kept as a regression target.

    It agrees with :func:`vielbein_matrix` wherever ``theta == alpha``.
    """
    alpha, beta, _ = a
    return np.array(
        [
            [np.sin(alpha) * np.sin(beta), -np.cos(alpha) * np.sin(beta), np.cos(beta)],
            [np.cos(alpha), np.sin(alpha), 0.0],
            [0.0, 0.0, 1.0],
        ]
    )


def _beta_singular(beta):
    return abs(np.sin(beta)) < SINGULAR_BETA_TOL


def vielbein_at(a):
    M = vielbein_matrix(a)
    if _beta_singular(a[1]):
        return Vielbein(M, None)
    return Vielbein(M, np.linalg.inv(M))


def electric_fields_one_edge(a):
    """Body-frame field coefficients: row ``a`` holds ``Y_a`` in (alpha, beta, theta)."""
    if _beta_singular(a[1]):
        raise ChartSingularityError(f"Euler chart is singular at beta={a[1]!r}")
    return np.linalg.inv(vielbein_matrix(a))


def contract_fields(a):
    """Left-frame coefficients ``X_b`` with ``X_b U = -i t_b U`` so ``l_b = -i X_b``."""
    Y = electric_fields_one_edge(a)
    R = adjoint(euler_compose(a))
    return -np.sqrt(2.0) * R @ Y


def printed_one_edge_inverse_metric(a):
    """The one-edge inverse metric components as printed (regression target only)."""
    alpha, beta, _ = a
    sa, ca, sb, cb = np.sin(alpha), np.cos(alpha), np.sin(beta), np.cos(beta)
    g = np.empty((3, 3))
    g[0, 0] = 1.0 / sb**2
    g[0, 1] = g[1, 0] = 0.0
    g[0, 2] = g[2, 0] = sa * np.sin(beta - alpha) / sb**2
    g[1, 1] = 1.0
    g[1, 2] = g[2, 1] = sa**2 + sa * ca * cb / sb
    g[2, 2] = sa**2 / sb**2 + 1.0
    return g


# --------------------------------------------------------------------- chart


@dataclass(frozen=True, eq=False)
class ChartPoint:
    lattice: Lattice
    coords: np.ndarray
    names: tuple
    signs: dict
    base: Optional[FixedConfiguration] = None
    free_edge: bool = False

    @property
    def dim(self):
        return len(self.coords)

    def with_coords(self, coords):
        return ChartPoint(self.lattice, np.asarray(coords, dtype=float), self.names, self.signs, self.base, self.free_edge)

    def header(self):
        return [f"{e}:{name}" for e, name in self.names]


def _chart_edges(lattice):
    last = lattice.last_edge
    others = [e for e in lattice.free_edges() if e != last]
    return last, others


def chart_point(config):
    """Chart point of a field, gauge fixing it first unless the lattice has a single edge.

    ``config`` is a :class:`GaugeField` or an already fixed configuration.
    """
    if isinstance(config, GaugeField):
        lattice = config.lattice
        if lattice.n_edges == 1:
            e = lattice.edges[0]
            angles, sign = euler_decompose(config.links[0])
            return ChartPoint(lattice, np.array(angles), tuple((e, n) for n in ANGLE_NAMES), {e: sign}, None, True)
        config = reconstruct_orbit_representative(config)
    cfg = config
    lattice = cfg.lattice
    last, others = _chart_edges(lattice)
    if last is None:
        raise ValueError(f"a {lattice.n1}x{lattice.n2} lattice has no free edges to chart")
    coords, names, signs = [], [], {}
    q = cfg.field[last]
    # last edge is sign * exp(i alpha/2 sz) with sign fixed to +1 when q3 >= 0
    alpha = 2.0 * np.arctan2(q[3], q[0])
    sign = 1
    if alpha < 0.0:
        alpha += 4.0 * np.pi
    if alpha >= 2.0 * np.pi:
        alpha -= 2.0 * np.pi
        sign = -1
    coords.append(alpha)
    names.append((last, "alpha"))
    signs[last] = sign
    for e in others:
        angles, s = euler_decompose(cfg.field[e])
        coords.extend(angles)
        names.extend((e, n) for n in ANGLE_NAMES)
        signs[e] = s
    return ChartPoint(lattice, np.array(coords), tuple(names), signs, cfg, False)


def chart_field(point, coords=None):
    """Gauge field on the slice at the given chart coordinates."""
    x = point.coords if coords is None else np.asarray(coords, dtype=float)
    lat = point.lattice
    if point.free_edge:
        e = lat.edges[0]
        return GaugeField(lat, [point.signs[e] * euler_compose(x)])
    last, others = _chart_edges(lat)
    links = np.tile(IDENTITY, (lat.n_edges, 1))
    a = x[0]
    links[lat.edge_index[last]] = point.signs[last] * np.array([np.cos(a / 2), 0.0, 0.0, np.sin(a / 2)])
    for k, e in enumerate(others):
        links[lat.edge_index[e]] = point.signs[e] * euler_compose(x[1 + 3 * k: 4 + 3 * k])
    return GaugeField(lat, links)


def constraint_direction(point):
    """Unit chart vector of the residual diagonal gauge rotation, or ``None``."""
    if point.free_edge:
        return None
    _, others = _chart_edges(point.lattice)
    if not others:
        return None
    c = np.zeros(point.dim)
    for k in range(len(others)):
        c[1 + 3 * k] = -1.0
        c[3 + 3 * k] = 1.0
    return c / np.linalg.norm(c)


def tangent_matrix(point, coords=None):
    """Body-frame components (3E rows) of every chart coordinate vector."""
    x = point.coords if coords is None else np.asarray(coords, dtype=float)
    lat = point.lattice
    T = np.zeros((3 * lat.n_edges, point.dim))
    if point.free_edge:
        T[:, :] = vielbein_matrix(x).T
        return T
    last, others = _chart_edges(lat)
    i = lat.edge_index[last]
    T[3 * i + 2, 0] = 1.0
    for k, e in enumerate(others):
        i = lat.edge_index[e]
        T[3 * i: 3 * i + 3, 1 + 3 * k: 4 + 3 * k] = vielbein_matrix(x[1 + 3 * k: 4 + 3 * k]).T
    return T


def gauge_matrix(U):
    """Body-frame deformation of every link under an infinitesimal gauge rotation at each site.

    Column ``(site, b)``: outgoing links move by ``e_b``, incoming ones by ``-R^T e_b``.
    """
    lat = U.lattice
    D = np.zeros((3 * lat.n_edges, 3 * lat.n_sites))
    R = adjoint(U.links)
    for i, e in enumerate(lat.edges):
        s = lat.site_index[e.site]
        t = lat.site_index[e.end]
        D[3 * i: 3 * i + 3, 3 * s: 3 * s + 3] += np.eye(3)
        D[3 * i: 3 * i + 3, 3 * t: 3 * t + 3] -= R[i].T
    return D


# ------------------------------------------------------- Gauss substitution


@dataclass(frozen=True, eq=False)
class VectorFieldMatrix:
    rows: np.ndarray
    labels: tuple
    blocks: tuple
    names: tuple
    coefficients: Optional[dict] = field(default=None, repr=False)

    def block(self, name):
        idx = [i for i, b in enumerate(self.blocks) if b == name]
        return self.rows[idx]


def _check_point(point):
    if point.free_edge:
        if _beta_singular(point.coords[1]):
            raise ChartSingularityError("free edge sits on the beta-singular set")
        return
    if point.base is not None and point.base.singular:
        raise StabilizerDegeneracyError("configuration lies on a conically-singular orbit")
    _, others = _chart_edges(point.lattice)
    for k, e in enumerate(others):
        if _beta_singular(point.coords[2 + 3 * k]):
            raise ChartSingularityError(f"Euler chart is singular on edge {e}")


def _covariant_derivative(C, R, lat, y1, y2):
    """Coefficient rows of ``D_2 Y_2(y1, y2)`` with the open-boundary cutoff."""
    out = 0.0
    if y2 <= lat.n2 - 2:
        out = out + C[EdgeId(y1, y2, 2)]
    if y2 >= 1:
        prev = EdgeId(y1, y2 - 1, 2)
        out = out - R[prev] @ C[prev]
    return out


def gauss_substitution(cfg, point, coords=None):
    """First-order fields of the Laplace-Beltrami decomposition at a chart point.

    Every body-frame generator ``Y_b`` on every link is rewritten, via Gauss'
    law on gauge-invariant functions, as a combination of generators on the
    free links, and then as a chart vector.  Rows are grouped as
    ``delta1`` (free links other than the last), ``delta2`` (1-links),
    ``delta3`` (2-links of column 0) and ``delta4..6`` (the last link, b = 1..3).
    """
    x = point.coords if coords is None else np.asarray(coords, dtype=float)
    check = point.with_coords(x)
    _check_point(check)
    lat = point.lattice
    if point.free_edge:
        Y = electric_fields_one_edge(x)
        e = lat.edges[0]
        return VectorFieldMatrix(Y, tuple((e, b) for b in range(3)), ("delta1",) * 3, point.names)

    U = chart_field(point, x)
    last, others = _chart_edges(lat)
    nb = 3 * len(others) + 1
    R = {e: adjoint(U[e]) for e in lat.edges}

    # basis: generators of the free links other than the last, then Y_3 on the last link
    C = {}
    for k, e in enumerate(others):
        sel = np.zeros((3, nb))
        sel[:, 3 * k: 3 * k + 3] = np.eye(3)
        C[e] = sel
    xi = sum(((np.eye(3) - R[e]) @ C[e] for e in others), np.zeros((3, nb)))
    A = (np.eye(3) - R[last])[:2, :2]
    # eigenvalues of the last-link rotation are 1, k, 1/k
    one_minus_k = complex(A[0, 0], A[1, 0])
    if abs(one_minus_k) < DEGENERACY_TOL:
        raise StabilizerDegeneracyError("last link too close to the centre; 1 - k vanishes")
    c_last = np.zeros((3, nb))
    c_last[:2] = -np.linalg.solve(A, xi[:2])
    c_last[2, nb - 1] = 1.0
    C[last] = c_last

    for x2 in range(lat.n2 - 1):
        acc = np.zeros((3, nb))
        for y2 in range(x2 + 1):
            for y1 in range(1, lat.n1):
                acc = acc + _covariant_derivative(C, R, lat, y1, y2)
        C[EdgeId(0, x2, 2)] = -acc
    for x2 in range(lat.n2):
        acc = np.zeros((3, nb))
        for x1 in range(lat.n1 - 1):
            acc = acc + _covariant_derivative(C, R, lat, x1, x2)
            C[EdgeId(x1, x2, 1)] = -acc

    B = np.zeros((nb, point.dim))
    for k_, e in enumerate(others):
        B[3 * k_: 3 * k_ + 3, 1 + 3 * k_: 4 + 3 * k_] = electric_fields_one_edge(x[1 + 3 * k_: 4 + 3 * k_])
    B[nb - 1, 0] = 1.0

    rows, labels, blocks = [], [], []
    for e in lat.edges:
        if e == last:
            block = ("delta4", "delta5", "delta6")
        elif e.j == 1:
            block = ("delta2",) * 3
        elif e.x1 == 0:
            block = ("delta3",) * 3
        else:
            block = ("delta1",) * 3
        rows.append(C[e] @ B)
        labels.extend((e, b) for b in range(3))
        blocks.extend(block)
    return VectorFieldMatrix(np.vstack(rows), tuple(labels), tuple(blocks), point.names, coefficients=C)


def decompose_tangent(point, coords=None):
    """Rows of the same fields from a direct split of each link generator.

    Each body-frame generator is written as (chart tangent) + (gauge
    deformation) by least squares, with the chart part taken orthogonal to
    the constraint direction.  Independent of the Gauss-law bookkeeping.
    """
    x = point.coords if coords is None else np.asarray(coords, dtype=float)
    T = tangent_matrix(point, x)
    if point.free_edge:
        return np.linalg.solve(T, np.eye(3)).T
    U = chart_field(point, x)
    D = gauge_matrix(U)
    c = constraint_direction(point)
    Q = np.eye(point.dim) if c is None else scipy.linalg.null_space(c[None, :])
    J = np.hstack([T @ Q, D])
    sol = np.linalg.lstsq(J, np.eye(J.shape[0]), rcond=None)[0]
    return (Q @ sol[: Q.shape[1]]).T


# -------------------------------------------------------------------- metrics


@dataclass(frozen=True, eq=False)
class MetricPair:
    g_inv: Optional[np.ndarray] = None
    g: Optional[np.ndarray] = None
    constraint_direction: Optional[np.ndarray] = None
    projector: Optional[np.ndarray] = None


def inverse_metric(E, constraint=None):
    rows = E.rows if isinstance(E, VectorFieldMatrix) else np.asarray(E, dtype=float)
    return MetricPair(g_inv=rows.T @ rows, constraint_direction=constraint)


def gauge_projector(D):
    if D.shape[1] == 0:
        return np.eye(D.shape[0])
    G = D.T @ D
    return np.eye(D.shape[0]) - D @ np.linalg.pinv(G, rcond=PINV_CUTOFF, hermitian=True) @ D.T


def projection_metric(cfg, point, coords=None):
    """Metric ``T^T P T`` with ``P`` the projector off infinitesimal gauge deformations."""
    x = point.coords if coords is None else np.asarray(coords, dtype=float)
    _check_point(point.with_coords(x))
    T = tangent_matrix(point, x)
    if point.free_edge:
        P = np.eye(T.shape[0])
    else:
        P = gauge_projector(gauge_matrix(chart_field(point, x)))
    return MetricPair(g=T.T @ P @ T, constraint_direction=constraint_direction(point), projector=P)


def metric_pair(cfg, point, coords=None):
    E = gauss_substitution(cfg, point, coords)
    proj = projection_metric(cfg, point, coords)
    return MetricPair(
        g_inv=E.rows.T @ E.rows, g=proj.g, constraint_direction=proj.constraint_direction, projector=proj.projector
    )


def consistency_check(pair):
    """``g @ g_inv`` against the identity on the complement of the constraint direction."""
    prod = pair.g @ pair.g_inv
    n = prod.shape[0]
    c = pair.constraint_direction
    Q = np.eye(n) if c is None else scipy.linalg.null_space(np.asarray(c)[None, :])
    restricted = Q.T @ prod @ Q
    residual = float(np.max(np.abs(restricted - np.eye(Q.shape[1]))))
    along = None if c is None else float(np.linalg.norm(prod @ c))
    sym = max(float(np.max(np.abs(pair.g - pair.g.T))), float(np.max(np.abs(pair.g_inv - pair.g_inv.T))))
    return {
        "complement_residual": residual,
        "constraint_residual": along,
        "symmetry_defect": sym,
        "min_eig_g": float(np.min(np.linalg.eigvalsh(0.5 * (pair.g + pair.g.T)))),
        "min_eig_g_inv": float(np.min(np.linalg.eigvalsh(0.5 * (pair.g_inv + pair.g_inv.T)))),
        "rank_g_inv": int(np.linalg.matrix_rank(pair.g_inv, tol=1e-9 * max(1.0, np.max(np.abs(pair.g_inv))))),
        "ok": residual <= 1e-8,
    }


def log_density(point, coords=None):
    """Log of the Haar volume carried by a chart cell (orbit volume times base volume)."""
    x = point.coords if coords is None else np.asarray(coords, dtype=float)
    T = tangent_matrix(point, x)
    if point.free_edge:
        return float(np.linalg.slogdet(T)[1])
    D = gauge_matrix(chart_field(point, x))
    evals = np.linalg.eigvalsh(D.T @ D)
    kept = evals[evals > PINV_CUTOFF * evals.max()]
    log_orbit = 0.5 * float(np.sum(np.log(kept)))
    g = T.T @ gauge_projector(D) @ T
    c = constraint_direction(point)
    Q = np.eye(point.dim) if c is None else scipy.linalg.null_space(c[None, :])
    log_base = 0.5 * float(np.linalg.slogdet(Q.T @ g @ Q)[1])
    return log_orbit + log_base


# ---------------------------------------------------------- Laplace-Beltrami


# five-point central stencils, fourth order in the step
_D1 = ((2, -1.0), (1, 8.0), (-1, -8.0), (-2, 1.0)), 12.0
_D2 = ((2, -1.0), (1, 16.0), (0, -30.0), (-1, 16.0), (-2, -1.0)), 12.0


def _directional(F, x, v, h, stencil):
    taps, denom = stencil
    order = 1 if stencil is _D1 else 2
    return sum(c * F(x + k * h * v) for k, c in taps) / (denom * h**order)


def _gradient(F, x, h):
    return np.array([_directional(F, x, e, h, _D1) for e in np.eye(len(x))])


def _row_second_derivatives(F, x, rows, h):
    """``sum_r (v_r . d)^2 F`` by second differences along each row direction."""
    return sum(_directional(F, x, v, h, _D2) for v in rows if np.any(v))


def weighted_inverse_metric(point, coords=None):
    """``(w, w * g^{mu nu})`` with ``w`` the Haar density of the chart."""
    x = point.coords if coords is None else np.asarray(coords, dtype=float)
    E = gauss_substitution(point.base, point, x).rows
    w = np.exp(log_density(point, x))
    return w, w * (E.T @ E)


def lb_apply_chart(point, F, h=FD_STEP):
    """``-Delta F`` at ``point`` for a function ``F`` of the chart coordinates.

    Uses ``-Delta = -2 (sum_r (E_r . d)^2 + b^nu d_nu)``, where the second
    derivatives are taken along each row at the base point (so their sum is
    ``g^{mu nu} d_mu d_nu``) and ``b^nu = w^-1 d_mu (w g^{mu nu})`` collects the
    first-order part, ``w`` being the Haar density of the chart.  All
    derivatives use five-point stencils with step ``h``.
    """
    x0 = point.coords
    n = len(x0)
    w0, _ = weighted_inverse_metric(point, x0)
    drift = np.zeros(n)
    for mu, e in enumerate(np.eye(n)):
        drift += _directional(lambda x: weighted_inverse_metric(point, x)[1][mu], x0, e, h, _D1)
    drift /= w0
    rows = gauss_substitution(point.base, point, x0).rows
    second = _row_second_derivatives(F, x0, rows, h)
    grad = _gradient(F, x0, h)
    return -LB_SCALE * (second + float(drift @ grad))


def lb_apply(cfg, point, f, h=FD_STEP):
    """``-Delta f`` for a gauge-invariant function ``f`` of the whole field."""
    return lb_apply_chart(point, lambda x: f(chart_field(point, x)), h=h)


def laplacian_direct(U, f, h=FD_STEP):
    """``-sum_links sum_b d^2/d eps^2 f(exp(-i eps t_b) U)``, i.e. ``sum l_b^2 f``."""
    total = 0.0
    for i in range(U.lattice.n_edges):
        for b in range(3):

            def moved(eps):
                links = U.links.copy()
                links[i] = quat_mul(exp_su2(-eps[0] * np.eye(3)[b]), U.links[i])
                return f(GaugeField(U.lattice, links))

            total += _directional(moved, np.zeros(1), np.ones(1), h, _D2)
    return -total


def frame_contract_defect(a, h=1e-5):
    """Max over b of | l_b U + t_b U | with ``l_b`` from :func:`contract_fields`."""
    X = contract_fields(a)
    Um = to_matrix(euler_compose(a))
    worst = 0.0
    for b in range(3):
        dU = np.zeros((2, 2), dtype=complex)
        for g in range(3):
            e = np.zeros(3)
            e[g] = h
            diff = to_matrix(euler_compose(np.add(a, e))) - to_matrix(euler_compose(np.subtract(a, e)))
            dU += X[b, g] * diff / (2.0 * h)
        lU = -1j * dU
        worst = max(worst, float(np.max(np.abs(lU + SU_BASIS[b] @ Um))))
    return worst


# ---------------------------------------------------------------- geodesics


@dataclass
class GeodesicPath:
    times: np.ndarray
    points: list
    coords: np.ndarray
    flags: np.ndarray
    names: tuple = ()

    def increments(self):
        return np.abs(np.diff(self.coords, axis=0))


def _unwrap_to(prev, cur, names):
    out = cur.copy()
    for k, (_, name) in enumerate(names):
        if name in ("alpha", "theta"):
            out[k] = cur[k] + 2.0 * np.pi * np.round((prev[k] - cur[k]) / (2.0 * np.pi))
    return out


def chart_conditioning(point):
    """Distance of a chart point from the places where the chart or the fixing degenerate.

    The minimum of ``|sin beta|`` over free edges, ``|sin phi|`` of the last
    edge and the off-diagonal size of the residual-phase reference edge.
    """
    if point.free_edge:
        return abs(np.sin(point.coords[1]))
    cfg = point.base
    if cfg is None or cfg.singular:
        return 0.0
    values = [abs(np.sin(point.coords[0] / 2.0))]
    values.extend(abs(np.sin(b)) for b in point.coords[2::3])
    if cfg.reference_edge is not None:
        q = cfg.field[cfg.reference_edge]
        values.append(float(np.hypot(q[1], q[2])))
    return float(min(values))


def geodesic_path(lattice, tau, steps, t_max, jump_factor=10.0, boundary_margin=0.05):
    """Gauge-fixed image of ``U_j(x; t) = exp(i tau(x, j) t)`` on a uniform grid.

    ``tau`` maps each edge to a 3-vector of components along ``t_a``.  A
    step is flagged when an endpoint lies within ``boundary_margin`` of a
    chart or fixing degeneracy (see :func:`chart_conditioning`), or when its
    coordinate jump exceeds ``jump_factor`` times the median step.
    """
    times = np.linspace(0.0, t_max, steps + 1)
    tau_arr = np.array([np.asarray(tau[e], dtype=float) for e in lattice.edges])
    points, coords, near = [], [], []
    for t in times:
        U = GaugeField(lattice, exp_su2(tau_arr * t))
        p = chart_point(U)
        points.append(p)
        near.append(chart_conditioning(p) < boundary_margin)
        coords.append(p.coords if not coords else _unwrap_to(coords[-1], p.coords, p.names))
    coords = np.array(coords)
    near = np.array(near)
    inc = np.max(np.abs(np.diff(coords, axis=0)), axis=1) if len(coords) > 1 else np.zeros(0)
    typical = float(np.median(inc)) if len(inc) else 0.0
    flags = (inc > jump_factor * typical) | near[:-1] | near[1:]
    names = points[0].names if points else ()
    return GeodesicPath(times, points, coords, flags, names)
