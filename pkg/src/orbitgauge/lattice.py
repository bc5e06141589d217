"""Open rectangular 2-D lattice, gauge fields, gauge transformations and I/O.

Sites are integer pairs ``(x1, x2)`` with ``0 <= xj < nj``.  The edge
``(x1, x2, j)`` joins ``x`` to ``x + j_hat``.  Edges are kept in row-major
order, i.e. sorted lexicographically by ``(x1, x2, j)``.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .group import IDENTITY, haar_sample, quat_inv, quat_mul

FORMAT_TAG = "orbitgauge"
FORMAT_VERSION = "v1"


class FieldFormatError(ValueError):
    """Raised for a malformed or inconsistent field file."""


class EdgeId(NamedTuple):
    x1: int
    x2: int
    j: int

    @property
    def site(self):
        return (self.x1, self.x2)

    @property
    def end(self):
        return (self.x1 + 1, self.x2) if self.j == 1 else (self.x1, self.x2 + 1)

    def __str__(self):
        return f"({self.x1},{self.x2},{self.j})"


@dataclass(frozen=True)
class Lattice:
    n1: int
    n2: int

    def __post_init__(self):
        if int(self.n1) < 1 or int(self.n2) < 1:
            raise ValueError(f"lattice extents must be positive, got {self.n1}x{self.n2}")

    @property
    def n_sites(self):
        return self.n1 * self.n2

    @property
    def n_edges(self):
        return self.n2 * (self.n1 - 1) + self.n1 * (self.n2 - 1)

    @cached_property
    def sites(self):
        return tuple((x1, x2) for x1 in range(self.n1) for x2 in range(self.n2))

    @cached_property
    def edges(self):
        out = []
        for x1 in range(self.n1):
            for x2 in range(self.n2):
                if x1 + 1 < self.n1:
                    out.append(EdgeId(x1, x2, 1))
                if x2 + 1 < self.n2:
                    out.append(EdgeId(x1, x2, 2))
        return tuple(out)

    @cached_property
    def edge_index(self):
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def site_index(self):
        return {s: i for i, s in enumerate(self.sites)}

    def has_edge(self, x1, x2, j):
        return EdgeId(x1, x2, j) in self.edge_index

    def plaquette_corners(self):
        return [(x1, x2) for x1 in range(self.n1 - 1) for x2 in range(self.n2 - 1)]

    def tree_edges(self):
        """The axial maximal tree: every 1-edge plus the 2-edges of column 0."""
        return [e for e in self.edges if e.j == 1 or e.x1 == 0]

    def free_edges(self):
        return [e for e in self.edges if e.j == 2 and e.x1 >= 1]

    @property
    def last_edge(self):
        e = EdgeId(1, 0, 2)
        return e if e in self.edge_index else None


@dataclass(frozen=True, eq=False)
class GaugeField:
    """Map edge -> unit quaternion, stored as an ``(n_edges, 4)`` array in edge order."""

    lattice: Lattice
    links: np.ndarray = field(repr=False)

    def __post_init__(self):
        links = np.array(self.links, dtype=float)
        if links.shape != (self.lattice.n_edges, 4):
            raise ValueError(f"expected links of shape {(self.lattice.n_edges, 4)}, got {links.shape}")
        links.setflags(write=False)
        object.__setattr__(self, "links", links)

    def __getitem__(self, edge):
        return self.links[self.lattice.edge_index[EdgeId(*edge)]]

    def replace(self, updates):
        """Copy with some edges overwritten; ``updates`` maps edge -> quaternion."""
        links = self.links.copy()
        for e, q in updates.items():
            links[self.lattice.edge_index[EdgeId(*e)]] = q
        return GaugeField(self.lattice, links)

    @classmethod
    def identity(cls, lattice):
        return cls(lattice, np.tile(IDENTITY, (lattice.n_edges, 1)))

    @classmethod
    def random(cls, lattice, seed=None):
        return cls(lattice, haar_sample(seed, size=lattice.n_edges))

    def allclose(self, other, atol):
        return self.lattice == other.lattice and bool(np.max(np.abs(self.links - other.links), initial=0.0) <= atol)


@dataclass(frozen=True, eq=False)
class GaugeTransform:
    """Map site -> unit quaternion, stored as an ``(n1, n2, 4)`` array."""

    lattice: Lattice
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.lattice.n1, self.lattice.n2, 4):
            raise ValueError(f"expected values of shape {(self.lattice.n1, self.lattice.n2, 4)}, got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __getitem__(self, site):
        return self.values[site[0], site[1]]

    @classmethod
    def identity(cls, lattice):
        return cls(lattice, np.tile(IDENTITY, (lattice.n1, lattice.n2, 1)))

    @classmethod
    def constant(cls, lattice, q):
        return cls(lattice, np.tile(np.asarray(q, dtype=float), (lattice.n1, lattice.n2, 1)))

    @classmethod
    def random(cls, lattice, seed=None):
        return cls(lattice, haar_sample(seed, size=(lattice.n1, lattice.n2)))

    def inverse(self):
        return GaugeTransform(self.lattice, quat_inv(self.values))

    def __mul__(self, other):
        """Sitewise product ``K(x) L(x)``."""
        return GaugeTransform(self.lattice, quat_mul(self.values, other.values))


def _endpoints(lattice):
    starts = np.array([e.site for e in lattice.edges], dtype=int).reshape(-1, 2)
    ends = np.array([e.end for e in lattice.edges], dtype=int).reshape(-1, 2)
    return starts, ends


def apply_gauge(U, K):
    """``V_j(x) = K(x + j_hat)^-1 U_j(x) K(x)``."""
    if U.lattice != K.lattice:
        raise ValueError("field and transform live on different lattices")
    starts, ends = _endpoints(U.lattice)
    k_start = K.values[starts[:, 0], starts[:, 1]]
    k_end = K.values[ends[:, 0], ends[:, 1]]
    return GaugeField(U.lattice, quat_mul(quat_mul(quat_inv(k_end), U.links), k_start))


def plaquette_holonomy(U, corner):
    """Ordered product ``U_2(x)^-1 U_1(x+2)^-1 U_2(x+1) U_1(x)`` around the unit square."""
    x1, x2 = corner
    lat = U.lattice
    if not (0 <= x1 < lat.n1 - 1 and 0 <= x2 < lat.n2 - 1):
        raise ValueError(f"no plaquette with corner {corner} on a {lat.n1}x{lat.n2} lattice")
    a = U[(x1, x2, 1)]
    b = U[(x1 + 1, x2, 2)]
    c = U[(x1, x2 + 1, 1)]
    d = U[(x1, x2, 2)]
    return quat_mul(quat_mul(quat_inv(d), quat_inv(c)), quat_mul(b, a))


def plaquette_trace(U, corner):
    """Re Tr of the plaquette holonomy, i.e. ``2 q0``."""
    return 2.0 * float(plaquette_holonomy(U, corner)[0])


def plaquette_table(U):
    return [(x1, x2, plaquette_trace(U, (x1, x2))) for x1, x2 in U.lattice.plaquette_corners()]


def wilson_terms(U, V, K):
    """Space-time and space-space plaquette sums for one time step.

    The temporal links are ``K``, the earlier slice ``U`` and the later one
    ``V``.  Offsets are chosen per trace term so each vanishes on trivial
    plaquettes: ``L_st = sum_edges (1 - Re Tr P / 2)`` and
    ``L_ss = sum_plaquettes (2 - Re Tr P)`` over the slice ``U``.
    """
    starts, ends = _endpoints(U.lattice)
    k_start = K.values[starts[:, 0], starts[:, 1]]
    k_end = K.values[ends[:, 0], ends[:, 1]]
    # Tr K(x) V^-1 K(x+j)^-1 U
    hol = quat_mul(quat_mul(quat_mul(k_start, quat_inv(V.links)), quat_inv(k_end)), U.links)
    l_st = float(np.sum(1.0 - hol[:, 0]))
    l_ss = float(sum(2.0 - plaquette_trace(U, c) for c in U.lattice.plaquette_corners()))
    return l_st, l_ss


# ---------------------------------------------------------------- file I/O


def format_field(U, comment=None):
    lat = U.lattice
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append(f"{FORMAT_TAG} {FORMAT_VERSION} {lat.n1} {lat.n2}")
    for e, q in zip(lat.edges, U.links):
        lines.append(f"{e.x1} {e.x2} {e.j} " + " ".join(f"{v:.17g}" for v in q))
    return "\n".join(lines) + "\n"


def parse_field(text, norm_tol=1e-9):
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise FieldFormatError("empty field file")
    head = rows[0].split()
    if len(head) != 4 or head[0] != FORMAT_TAG or head[1] != FORMAT_VERSION:
        raise FieldFormatError(f"malformed header: {rows[0]!r}")
    try:
        lat = Lattice(int(head[2]), int(head[3]))
    except ValueError as exc:
        raise FieldFormatError(f"malformed header: {rows[0]!r}") from exc
    body = rows[1:]
    if len(body) != lat.n_edges:
        raise FieldFormatError(f"edge count mismatch: expected {lat.n_edges}, found {len(body)}")
    links = np.empty((lat.n_edges, 4))
    seen = set()
    for lineno, row in enumerate(body, start=2):
        parts = row.split()
        if len(parts) != 7:
            raise FieldFormatError(f"line {lineno}: expected 7 columns, found {len(parts)}")
        try:
            edge = EdgeId(int(parts[0]), int(parts[1]), int(parts[2]))
            q = np.array([float(p) for p in parts[3:]])
        except ValueError as exc:
            raise FieldFormatError(f"line {lineno}: {exc}") from exc
        if edge not in lat.edge_index:
            raise FieldFormatError(f"line {lineno}: edge {edge} not on a {lat.n1}x{lat.n2} lattice")
        if edge in seen:
            raise FieldFormatError(f"line {lineno}: duplicate edge {edge}")
        norm = float(np.linalg.norm(q))
        if abs(norm - 1.0) > norm_tol:
            raise FieldFormatError(f"line {lineno}: quaternion norm {norm:.12g} is not 1")
        seen.add(edge)
        links[lat.edge_index[edge]] = q
    return GaugeField(lat, links)


def atomic_write(path, text):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def field_io_write(path, U, comment=None):
    atomic_write(path, format_field(U, comment))


def field_io_read(path, norm_tol=1e-9):
    with open(path, encoding="utf-8") as fh:
        return parse_field(fh.read(), norm_tol=norm_tol)


def plaquette_csv(U, comment=None):
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x1", "x2", "trace"])
    for x1, x2, tr in plaquette_table(U):
        writer.writerow([x1, x2, f"{tr:.17g}"])
    return buf.getvalue()
