"""scikit-learn style adapters over the gauge-fixing and orbit-distance engines.

Samples are :class:`GaugeField` objects rather than feature rows, so ``X`` is
any sequence of fields on one lattice.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .gaugefix import reconstruct_orbit_representative
from .lattice import GaugeField, Lattice
from .metric import orbit_distance


def check_lattice(n1, n2, min_extent=1):
    n1, n2 = int(n1), int(n2)
    if n1 < min_extent or n2 < min_extent:
        raise ValueError(f"lattice extents must be >= {min_extent}, got {n1}x{n2}")
    return Lattice(n1, n2)


def check_field(U, lattice=None, atol=1e-9):
    """Validate one gauge field: type, lattice and unit-norm links."""
    if not isinstance(U, GaugeField):
        raise TypeError(f"expected a GaugeField, got {type(U).__name__}")
    if lattice is not None and U.lattice != lattice:
        raise ValueError(f"field lives on {U.lattice}, expected {lattice}")
    norms = np.linalg.norm(U.links, axis=1)
    if not np.all(np.isfinite(U.links)) or np.max(np.abs(norms - 1.0), initial=0.0) > atol:
        raise ValueError("field contains non-unit or non-finite links")
    return U


def check_fields(X, min_samples=1):
    fields = list(X)
    if len(fields) < min_samples:
        raise ValueError(f"need at least {min_samples} field(s), got {len(fields)}")
    lattice = fields[0].lattice if isinstance(fields[0], GaugeField) else None
    return [check_field(U, lattice) for U in fields]


class GaugeFixer(BaseEstimator, TransformerMixin):
    """Map fields to their gauge-fixed orbit representatives."""

    def __init__(self, strict=False):
        self.strict = strict

    def fit(self, X, y=None):
        fields = check_fields(X)
        self.lattice_ = fields[0].lattice
        return self

    def transform(self, X):
        if not hasattr(self, "lattice_"):
            raise NotFittedError("GaugeFixer is not fitted yet")
        out, flags = [], []
        for U in X:
            fixed = reconstruct_orbit_representative(check_field(U, self.lattice_))
            if fixed.singular and self.strict:
                raise ValueError("singular orbit encountered")
            out.append(fixed.field)
            flags.append(fixed.singular)
        self.singular_ = np.array(flags, dtype=bool)
        return out


class OrbitDistance(BaseEstimator, TransformerMixin):
    """Distances from each sample to the orbits of the fitted reference fields."""

    def __init__(self, tol=1e-13, max_sweeps=5000, restarts=8, omega=1.7, seed=0):
        self.tol = tol
        self.max_sweeps = max_sweeps
        self.restarts = restarts
        self.omega = omega
        self.seed = seed

    def fit(self, X, y=None):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        self.references_ = check_fields(X)
        self.lattice_ = self.references_[0].lattice
        return self

    def transform(self, X):
        if not hasattr(self, "references_"):
            raise NotFittedError("OrbitDistance is not fitted yet")
        fields = [check_field(U, self.lattice_) for U in X]
        kw = dict(tol=self.tol, max_sweeps=self.max_sweeps, restarts=self.restarts, omega=self.omega, seed=self.seed)
        D = np.empty((len(fields), len(self.references_)))
        conv = np.ones_like(D, dtype=bool)
        for i, U in enumerate(fields):
            for j, V in enumerate(self.references_):
                r = orbit_distance(U, V, **kw)
                D[i, j] = r.rho
                conv[i, j] = r.converged
        self.converged_ = conv
        return D
