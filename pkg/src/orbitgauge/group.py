"""SU(2) as unit quaternions.

A group element is stored as a real array ``(q0, q1, q2, q3)`` standing for
``U = q0*I + i*(q1*sx + q2*sy + q3*sz)``.  Every function accepts arrays with
arbitrary leading batch dimensions and a trailing axis of length 4.

The su(2) basis is ``t_a = sigma_a / sqrt(2)`` so that ``Tr t_a t_b = delta_ab``.
Euler angles use the half-angle form

    U = exp(i alpha/2 sz) exp(i beta/2 sx) exp(i theta/2 sz)

with ``alpha, theta`` in ``[0, 2pi)`` and ``beta`` in ``[0, pi]``.  Reducing
``alpha`` or ``theta`` by ``2pi`` flips the sign of ``U``; that sign is
returned separately by :func:`euler_decompose`.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * np.pi

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

#: normalized su(2) basis, Tr(t_a t_b) = delta_ab
SU_BASIS = PAULI / np.sqrt(2.0)

LEVI_CIVITA = np.zeros((3, 3, 3))
for _a, _b, _c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_a, _b, _c] = 1.0
    LEVI_CIVITA[_b, _a, _c] = -1.0


class EulerAngles(NamedTuple):
    alpha: float
    beta: float
    theta: float


def normalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def quat_mul(a, b, renormalize=True):
    """Group product ``a*b``.

    With ``U = q0 + i q.sigma`` the vector part of the product is
    ``a0*b + b0*a - a x b`` (note the minus sign relative to Hamilton's rule).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    b0, b1, b2, b3 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    out = np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + b0 * a1 - (a2 * b3 - a3 * b2),
            a0 * b2 + b0 * a2 - (a3 * b1 - a1 * b3),
            a0 * b3 + b0 * a3 - (a1 * b2 - a2 * b1),
        ],
        axis=-1,
    )
    return normalize(out) if renormalize else out


def quat_inv(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def quat_pow(q, power):
    """``q**power`` along the one-parameter subgroup through ``q``."""
    q = np.asarray(q, dtype=float)
    vec = q[..., 1:]
    vnorm = np.linalg.norm(vec, axis=-1, keepdims=True)
    angle = np.arctan2(vnorm, q[..., :1])
    safe = np.where(vnorm > 0.0, vnorm, 1.0)
    axis = np.where(vnorm > 0.0, vec / safe, 0.0)
    return np.concatenate([np.cos(power * angle), np.sin(power * angle) * axis], axis=-1)


def to_matrix(q):
    """2x2 complex matrix of a quaternion (batched)."""
    q = np.asarray(q, dtype=float)
    q0, q1, q2, q3 = np.moveaxis(q, -1, 0)
    m = np.empty(q.shape[:-1] + (2, 2), dtype=complex)
    m[..., 0, 0] = q0 + 1j * q3
    m[..., 0, 1] = q2 + 1j * q1
    m[..., 1, 0] = -q2 + 1j * q1
    m[..., 1, 1] = q0 - 1j * q3
    return m


def from_matrix(m):
    m = np.asarray(m, dtype=complex)
    q0 = 0.5 * (m[..., 0, 0] + m[..., 1, 1]).real
    q3 = 0.5 * (m[..., 0, 0] - m[..., 1, 1]).imag
    q1 = 0.5 * (m[..., 0, 1] + m[..., 1, 0]).imag
    q2 = 0.5 * (m[..., 0, 1] - m[..., 1, 0]).real
    return np.stack([q0, q1, q2, q3], axis=-1)


def exp_su2(v):
    """``exp(i v.t)`` for a real 3-vector ``v`` of components along ``t_a``."""
    v = np.asarray(v, dtype=float) / np.sqrt(2.0)
    r = np.linalg.norm(v, axis=-1, keepdims=True)
    safe = np.where(r > 0.0, r, 1.0)
    return np.concatenate([np.cos(r), np.where(r > 0.0, np.sin(r) * v / safe, 0.0)], axis=-1)


def adjoint(q):
    """SO(3) matrix ``R`` with ``U t_b U^-1 = R_ab t_a``."""
    q = np.asarray(q, dtype=float)
    q0 = q[..., 0]
    v = q[..., 1:]
    eye = np.eye(3)
    outer = v[..., :, None] * v[..., None, :]
    cross = np.zeros(q.shape[:-1] + (3, 3))
    cross[..., 0, 1] = -v[..., 2]
    cross[..., 0, 2] = v[..., 1]
    cross[..., 1, 0] = v[..., 2]
    cross[..., 1, 2] = -v[..., 0]
    cross[..., 2, 0] = -v[..., 1]
    cross[..., 2, 1] = v[..., 0]
    scale = (q0**2 - np.sum(v * v, axis=-1))[..., None, None]
    return scale * eye + 2.0 * outer - 2.0 * q0[..., None, None] * cross


def euler_compose(angles):
    """Unit quaternion of ``exp(i a/2 sz) exp(i b/2 sx) exp(i c/2 sz)``."""
    alpha, beta, theta = (np.asarray(x, dtype=float) for x in angles)
    s = 0.5 * (alpha + theta)
    d = 0.5 * (alpha - theta)
    cb, sb = np.cos(0.5 * beta), np.sin(0.5 * beta)
    return np.stack([cb * np.cos(s), sb * np.cos(d), -sb * np.sin(d), cb * np.sin(s)], axis=-1)


def _wrap(angle):
    """Reduce into [0, 2pi) and report how many 2pi shifts were applied."""
    turns = np.floor(angle / TWO_PI)
    reduced = angle - turns * TWO_PI
    if reduced >= TWO_PI:
        reduced -= TWO_PI
        turns += 1
    return float(reduced), int(turns)


def euler_decompose(q, tol=1e-12):
    """Invert :func:`euler_compose`.

    Returns ``(angles, sign)`` with ``euler_compose(angles) == sign * q``.
    On the singular set the redundant angle is dropped: at ``beta == 0``
    ``theta := 0`` and the whole phase goes to ``alpha``; at ``beta == pi``
    likewise ``theta := 0``.
    """
    q = np.asarray(q, dtype=float)
    z1 = complex(q[0], q[3])
    z2 = complex(q[1], -q[2])
    beta = 2.0 * np.arctan2(abs(z2), abs(z1))
    if abs(z2) <= tol:
        beta = 0.0
        s = np.angle(z1)
        alpha_raw, theta_raw = 2.0 * s, 0.0
    elif abs(z1) <= tol:
        beta = np.pi
        d = np.angle(z2)
        alpha_raw, theta_raw = 2.0 * d, 0.0
    else:
        s = np.angle(z1)
        d = np.angle(z2)
        alpha_raw, theta_raw = s + d, s - d
    alpha, ka = _wrap(alpha_raw)
    theta, kt = _wrap(theta_raw)
    sign = -1 if (ka + kt) % 2 else 1
    return EulerAngles(alpha, float(beta), theta), sign


def haar_sample(rng_seed=None, size=None):
    """Haar-random SU(2) element(s); ``rng_seed`` may be an int or a Generator."""
    rng = np.random.default_rng(rng_seed)
    shape = (4,) if size is None else tuple(np.atleast_1d(size)) + (4,)
    return normalize(rng.standard_normal(shape))


def is_unit(q, tol=1e-12):
    return bool(np.all(np.abs(np.linalg.norm(np.asarray(q, dtype=float), axis=-1) - 1.0) <= tol))
