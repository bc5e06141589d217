"""Complete axial gauge fixing.

Step one walks the axial maximal tree from the origin and sets every tree
link to the identity.  Step two applies one constant transformation that
makes the last free edge ``U_2(1,0)`` diagonal with non-negative ``sz``
component, then spends the leftover diagonal U(1) on the first free edge
that is not already diagonal, rotating its ``(q1, q2)`` onto the positive
``q1`` axis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .group import IDENTITY, quat_inv, quat_mul
from .lattice import EdgeId, GaugeField, GaugeTransform, Lattice, apply_gauge

SINGULAR_TRACE_MARGIN = 1e-10
DIAGONAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FixedConfiguration:
    field: GaugeField
    applied: GaugeTransform
    tree_edges: list
    source: Optional[GaugeField] = None
    singular: bool = False
    last_edge_fixed: bool = False
    phi: float = float("nan")
    reference_edge: Optional[EdgeId] = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.source is not None:
            check = apply_gauge(self.source, self.applied)
            if not check.allclose(self.field, 1e-12):
                raise ValueError("applied transform does not reproduce the fixed field")

    @property
    def lattice(self) -> Lattice:
        return self.field.lattice

    def report(self):
        return {
            "n1": self.lattice.n1,
            "n2": self.lattice.n2,
            "tree_size": len(self.tree_edges),
            "phi": None if np.isnan(self.phi) else float(self.phi),
            "singular": bool(self.singular),
            "reference_edge": None if self.reference_edge is None else list(self.reference_edge),
        }


def maximal_tree(U):
    """Set all tree links to the identity; ``K(0,0)`` is the identity."""
    lat = U.lattice
    K = np.empty((lat.n1, lat.n2, 4))
    K[0, 0] = IDENTITY
    for x2 in range(lat.n2 - 1):
        K[0, x2 + 1] = quat_mul(U[(0, x2, 2)], K[0, x2])
    for x2 in range(lat.n2):
        for x1 in range(lat.n1 - 1):
            K[x1 + 1, x2] = quat_mul(U[(x1, x2, 1)], K[x1, x2])
    applied = GaugeTransform(lat, K)
    fixed = apply_gauge(U, applied)
    tree = lat.tree_edges()
    # exact identities on the tree; the products above agree to rounding
    fixed = fixed.replace({e: IDENTITY for e in tree})
    return FixedConfiguration(fixed, applied, tree, source=None)


def _rotation_to_z(v):
    """Quaternion ``g`` with ``g^-1 (v.sigma) g`` proportional to ``+sz``."""
    r = float(np.linalg.norm(v))
    if r == 0.0:
        return IDENTITY.copy()
    n = v / r
    angle = np.arctan2(np.hypot(n[0], n[1]), n[2])
    axis = np.array([-n[1], n[0], 0.0])
    an = np.linalg.norm(axis)
    if an < 1e-300:
        axis = np.array([1.0, 0.0, 0.0])
    else:
        axis = axis / an
    # exp(i w sigma.n) rotates by -2w, so g = exp(-i angle/2 axis.sigma) maps z to n
    half = 0.5 * angle
    return np.concatenate([[np.cos(half)], -np.sin(half) * axis])


def _conjugate(field_, g):
    return GaugeField(field_.lattice, quat_mul(quat_mul(quat_inv(g), field_.links), g))


def fix_last_edge(partial):
    """Diagonalize ``U_2(1,0)`` with a constant transformation and fix the residual phase."""
    lat = partial.lattice
    last = lat.last_edge
    if last is None:
        return FixedConfiguration(partial.field, partial.applied, partial.tree_edges, singular=False)
    q = partial.field[last]
    if abs(2.0 * q[0]) > 2.0 - SINGULAR_TRACE_MARGIN:
        return FixedConfiguration(
            partial.field, partial.applied, partial.tree_edges, singular=True,
            last_edge_fixed=False, phi=float(np.arccos(np.clip(q[0], -1.0, 1.0))),
        )
    g = _rotation_to_z(q[1:])
    field_ = _conjugate(partial.field, g)
    reference = None
    for e in lat.free_edges():
        if e == last:
            continue
        p = field_[e]
        if np.hypot(p[1], p[2]) > DIAGONAL_TOL:
            # conjugation by exp(i chi sz) rotates (q1, q2) by +2 chi
            chi = -0.5 * np.arctan2(p[2], p[1])
            h = np.array([np.cos(chi), 0.0, 0.0, np.sin(chi)])
            g = quat_mul(g, h)
            field_ = _conjugate(field_, h)
            reference = e
            break
    applied = partial.applied * GaugeTransform.constant(lat, g)
    v = field_[last]
    field_ = field_.replace({last: [v[0], 0.0, 0.0, v[3]], **{e: IDENTITY for e in partial.tree_edges}})
    phi = float(np.arctan2(field_[last][3], field_[last][0]))
    return FixedConfiguration(
        field_, applied, partial.tree_edges, singular=False, last_edge_fixed=True,
        phi=phi, reference_edge=reference,
    )


def reconstruct_orbit_representative(U):
    """Unique representative of the gauge orbit of ``U`` (singular orbits are flagged)."""
    fixed = fix_last_edge(maximal_tree(U))
    return FixedConfiguration(
        fixed.field, fixed.applied, fixed.tree_edges, source=U, singular=fixed.singular,
        last_edge_fixed=fixed.last_edge_fixed, phi=fixed.phi, reference_edge=fixed.reference_edge,
    )


def tree_defect(field_):
    """Largest deviation of a tree link from the identity."""
    tree = field_.lattice.tree_edges()
    if not tree:
        return 0.0
    return float(max(np.max(np.abs(field_[e] - IDENTITY)) for e in tree))


def last_edge_offdiagonal(field_):
    last = field_.lattice.last_edge
    if last is None:
        return 0.0
    q = field_[last]
    return float(max(abs(q[1]), abs(q[2])))
