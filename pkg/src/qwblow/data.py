"""Compactly supported radial initial data.

Profiles are even functions of s supported in [-M, M], evaluable together
with their first two derivatives at any real argument.  Two families are
provided: polynomial bumps a*(1-(s/M)^2)^k with exact derivatives, and
sampled tables backed by a natural cubic spline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InputError

__all__ = ["RadialProfile", "PolyBump", "TableProfile", "make_profile", "zero_profile"]


class RadialProfile:
    """Base interface: value/d1/d2 accept scalars or arrays and vanish for |s| >= M."""

    M: float

    def value(self, s):
        raise NotImplementedError

    def d1(self, s):
        raise NotImplementedError

    def d2(self, s):
        raise NotImplementedError

    def scaled(self, factor: float) -> "RadialProfile":
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        return False

    def __call__(self, s):
        return self.value(s)


@dataclass(frozen=True)
class PolyBump(RadialProfile):
    """a * (1 - (s/M)^2)^k inside |s| < M, zero outside.

    k >= 3 keeps the second derivative continuous (and zero) at |s| = M.
    """

    M: float
    k: int
    amplitude: float

    def __post_init__(self):
        if not self.M > 0:
            raise InputError(f"support radius must be positive, got M={self.M}")
        if self.k < 3:
            raise InputError(f"poly_bump needs k >= 3 for C^2 regularity at the support edge, got k={self.k}")
        if not np.isfinite(self.amplitude):
            raise InputError(f"amplitude must be finite, got {self.amplitude}")

    def _inside(self, s):
        return np.abs(s) < self.M

    def value(self, s):
        s = np.asarray(s, dtype=float)
        x = s / self.M
        g = np.where(self._inside(s), 1.0 - x * x, 0.0)
        out = self.amplitude * g**self.k
        return out if out.ndim else float(out)

    def d1(self, s):
        s = np.asarray(s, dtype=float)
        x = s / self.M
        g = np.where(self._inside(s), 1.0 - x * x, 0.0)
        out = self.amplitude * self.k * g ** (self.k - 1) * (-2.0 * x) / self.M
        return out if out.ndim else float(out)

    def d2(self, s):
        s = np.asarray(s, dtype=float)
        x = s / self.M
        g = np.where(self._inside(s), 1.0 - x * x, 0.0)
        out = (
            self.amplitude
            * self.k
            * (4.0 * (self.k - 1) * x * x * g ** (self.k - 2) - 2.0 * g ** (self.k - 1))
            / self.M**2
        )
        return out if out.ndim else float(out)

    def scaled(self, factor: float) -> "PolyBump":
        return PolyBump(self.M, self.k, self.amplitude * factor)

    @property
    def is_zero(self) -> bool:
        return self.amplitude == 0.0


@dataclass(frozen=True)
class ZeroProfile(RadialProfile):
    """The identically vanishing profile."""

    M: float

    def value(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        return out if out.ndim else 0.0

    d1 = value
    d2 = value

    def scaled(self, factor: float) -> "ZeroProfile":
        return self

    @property
    def is_zero(self) -> bool:
        return True


@dataclass(frozen=True)
class TableProfile(RadialProfile):
    """Natural cubic spline through (nodes, values); zero outside [-M, M].

    Nodes must be strictly increasing and span [-M, M].  The table is
    required to be (approximately) even, because radial data are smooth
    functions of r^2.
    """

    M: float
    nodes: np.ndarray
    values: np.ndarray
    _spline: CubicSpline = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if not self.M > 0:
            raise InputError(f"support radius must be positive, got M={self.M}")
        if nodes.ndim != 1 or nodes.size < 4:
            raise InputError("sample_table needs at least 4 nodes")
        if np.any(np.diff(nodes) <= 0):
            raise InputError("sample_table nodes must be strictly increasing")
        if abs(nodes[0] + self.M) > 1e-12 * self.M or abs(nodes[-1] - self.M) > 1e-12 * self.M:
            raise InputError(f"sample_table nodes must span [-M, M] = [{-self.M}, {self.M}]")
        spline = CubicSpline(nodes, values, bc_type="natural")
        even_err = np.max(np.abs(spline(nodes) - spline(-nodes)))
        scale = max(np.max(np.abs(values)), 1e-300)
        if even_err > 1e-6 * scale:
            raise InputError("sample_table values are not even in s (radial data must be)")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_spline", spline)

    def _masked(self, s, f):
        s = np.asarray(s, dtype=float)
        out = np.where(np.abs(s) < self.M, f(np.clip(s, -self.M, self.M)), 0.0)
        return out if out.ndim else float(out)

    def value(self, s):
        return self._masked(s, self._spline)

    def d1(self, s):
        return self._masked(s, self._spline.derivative(1))

    def d2(self, s):
        return self._masked(s, self._spline.derivative(2))

    def scaled(self, factor: float) -> "TableProfile":
        return TableProfile(self.M, self.nodes, self.values * factor)

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0.0))


def zero_profile(M: float) -> ZeroProfile:
    return ZeroProfile(M)


def make_profile(kind: str, M: float, *, k: int = 4, amplitude: float = 1.0,
                 nodes=None, values=None) -> RadialProfile:
    """Build a profile from a description (the config layer feeds this).

    kind 'poly_bump' uses (k, amplitude); kind 'sample_table' uses (nodes, values);
    kind 'zero' ignores the rest.
    """
    if kind == "poly_bump":
        return PolyBump(M=M, k=k, amplitude=amplitude)
    if kind == "sample_table":
        if nodes is None or values is None:
            raise InputError("sample_table requires nodes and values")
        return TableProfile(M=M, nodes=np.asarray(nodes, float), values=np.asarray(values, float))
    if kind == "zero":
        return ZeroProfile(M=M)
    raise InputError(f"unknown profile kind {kind!r} (expected poly_bump, sample_table or zero)")
