"""Numerical machinery: semi-infinite quadrature, finite-difference stencils,
truncated multivariate forward-mode arithmetic and small tensor helpers.

Everything here is generic; the fish-eye specific pieces live in the other
modules and only call into this one.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError, StepSizeError, UnsupportedFunctionError

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 0.0
    max_subdivisions: int = 400
    truncation_constant: float = 42.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if self.abs_tol < 0:
            raise DomainError(f"abs_tol must be >= 0, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if not self.truncation_constant > 0:
            raise DomainError("truncation_constant must be > 0")


_GL_LOW = np.polynomial.legendre.leggauss(10)
_GL_HIGH = np.polynomial.legendre.leggauss(20)
_NODES = np.concatenate([_GL_LOW[0], _GL_HIGH[0]])


def _panel(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.asarray(f(mid + half * _NODES), dtype=float)
    n_low = _GL_LOW[0].size
    low = half * np.tensordot(_GL_LOW[1], vals[:n_low], axes=1)
    high = half * np.tensordot(_GL_HIGH[1], vals[n_low:], axes=1)
    return high, float(np.max(np.abs(high - low)))


def integrate_semi_infinite(f: Callable, decay_rate: float, cfg: QuadratureConfig | None = None):
    """Integrate ``f`` over [0, inf) for an integrand decaying like exp(-decay_rate*k).

    ``f`` must be vectorised: it receives a 1-d array of abscissae and returns
    an array whose leading axis runs over them (scalar or tensor valued).
    The interval is truncated at ``truncation_constant / decay_rate`` and
    split by deterministic global bisection; each panel is a 20-point
    Gauss-Legendre rule checked against the embedded 10-point rule.

    Returns ``(value, error_estimate)``; raises ConvergenceError when the
    subdivision budget runs out first.
    """
    cfg = cfg or QuadratureConfig()
    if not decay_rate > 0:
        raise DomainError(f"decay_rate must be > 0, got {decay_rate}")
    k_max = cfg.truncation_constant / decay_rate

    # generous tail bound; polynomial prefactors are not known here
    tail = 2.0 * float(np.max(np.abs(np.asarray(f(np.array([k_max]))))) / decay_rate)

    value, err = _panel(f, 0.0, k_max)
    panels = {0.0: (k_max, value, err)}
    heap = [(-err, 0.0)]
    while True:
        total = sum(panels[a][1] for a in sorted(panels))
        total_err = sum(panels[a][2] for a in sorted(panels)) + tail
        target = max(cfg.abs_tol, cfg.rel_tol * float(np.max(np.abs(total))))
        if total_err <= target:
            return total, total_err
        if len(panels) >= cfg.max_subdivisions:
            raise ConvergenceError("subdivision limit reached", total, total_err)
        _, a = heapq.heappop(heap)
        b = panels.pop(a)[0]
        m = 0.5 * (a + b)
        for lo, hi in ((a, m), (m, b)):
            v, e = _panel(f, lo, hi)
            panels[lo] = (hi, v, e)
            heapq.heappush(heap, (-e, lo))


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FDConfig:
    order: int = 4
    step_scale: float = 1e-3

    def __post_init__(self):
        if self.order not in (2, 4):
            raise DomainError(f"order must be 2 or 4, got {self.order}")
        if not 0 < self.step_scale < 0.1:
            raise DomainError(f"step_scale must lie in (0, 0.1), got {self.step_scale}")


_STENCILS = {
    (1, 2): (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    (1, 4): (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([1 / 12, -2 / 3, 2 / 3, -1 / 12])),
    (2, 2): (np.array([-1.0, 0.0, 1.0]), np.array([1.0, -2.0, 1.0])),
    (2, 4): (np.array([-2.0, -1.0, 0.0, 1.0, 2.0]), np.array([-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12])),
}


def stencil(derivative: int, order: int):
    """Offsets and weights of the centred stencil (weights assume unit step)."""
    try:
        return _STENCILS[(derivative, order)]
    except KeyError:
        raise DomainError(f"no stencil for derivative {derivative} at order {order}") from None


def fd_derivative(f: Callable, x: float, derivative: int = 1, cfg: FDConfig | None = None,
                  scale: float = 1.0, domain: tuple[float, float] | None = None):
    """Centred finite-difference derivative of a vectorised scalar function."""
    cfg = cfg or FDConfig()
    offsets, weights = stencil(derivative, cfg.order)
    h = cfg.step_scale * scale
    pts = x + h * offsets
    if domain is not None and (pts.min() <= domain[0] or pts.max() >= domain[1]):
        raise StepSizeError(f"stencil [{pts.min()}, {pts.max()}] leaves domain {domain}")
    vals = np.asarray(f(pts), dtype=float)
    return np.tensordot(weights, vals, axes=1) / h**derivative


def fd_partials(F: Callable, x, cfg: FDConfig | None = None, scale: float = 1.0):
    """First partials of a field on R^3 with a centred stencil.

    ``F`` maps an array of points ``(N, 3)`` to ``(N, *out)``. ``x`` may carry
    leading batch axes; the result has shape ``(*batch, 3, *out)`` with the
    derivative direction on the axis right after the batch axes.
    """
    cfg = cfg or FDConfig()
    offsets, weights = stencil(1, cfg.order)
    h = cfg.step_scale * scale
    x = np.asarray(x, dtype=float)
    batch = x.shape[:-1]
    shifts = h * offsets[None, :, None] * np.eye(3)[:, None, :]          # (3, S, 3)
    pts = x[..., None, None, :] + shifts                                  # (*batch, 3, S, 3)
    vals = np.asarray(F(pts.reshape(-1, 3)), dtype=float)
    out_shape = vals.shape[1:]
    vals = vals.reshape(batch + (3, offsets.size) + out_shape)
    return np.tensordot(vals, weights, axes=([len(batch) + 1], [0])) / h


def fd_curl(F: Callable, x, cfg: FDConfig | None = None, scale: float = 1.0):
    """Curl acting on the first (row) index of a 3x3 field: eps_ikl d_k F_lj."""
    J = fd_partials(F, x, cfg, scale)                     # (*batch, k, l, j)
    return np.einsum("ikl,...klj->...ij", LEVI_CIVITA, J)


def fd_mixed_partials(F: Callable, x, y, cfg: FDConfig | None = None, scale: float = 1.0):
    """Mixed partials d/dx_k d/dy_p of a two-point field ``F(x, y)``.

    ``F`` maps point arrays ``(N, 3), (N, 3)`` to ``(N, *out)``; returns an
    array of shape ``(3, 3, *out)`` indexed ``[k, p, ...]``.
    """
    cfg = cfg or FDConfig()
    offsets, weights = stencil(1, cfg.order)
    h = cfg.step_scale * scale
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    S = offsets.size
    shifts = h * offsets[None, :, None] * np.eye(3)[:, None, :]           # (3, S, 3)
    xs = np.broadcast_to(x + shifts[:, None, :, None, :], (3, 3, S, S, 3))
    ys = np.broadcast_to(y + shifts[None, :, None, :, :], (3, 3, S, S, 3))
    vals = np.asarray(F(xs.reshape(-1, 3), ys.reshape(-1, 3)), dtype=float)
    vals = vals.reshape((3, 3, S, S) + vals.shape[1:])
    return np.einsum("a,b,kpab...->kp...", weights, weights, vals) / h**2


# ---------------------------------------------------------------------------
# Truncated multivariate forward mode
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _subset_pairs(m):
    pairs = []
    for s in range(1 << m):
        subs = [a for a in range(1 << m) if a & s == a]
        pairs.append((np.array(subs), np.array([s ^ a for a in subs])))
    return tuple(pairs)


def _pad(c, ndim):
    return c.reshape(c.shape[:1] + (1,) * (ndim - c.ndim) + c.shape[1:])


class HyperDual:
    """Number ``c_0 + sum_S c_S eps_S`` over ``m`` nilpotent units (eps_i**2 = 0).

    ``c[S]`` is indexed by the bit mask ``S`` of the units in the product, so
    seeding unit ``i`` along direction ``e`` makes ``c[S]`` the exact mixed
    partial derivative along the seeded directions in ``S``. Trailing axes of
    ``c`` are batch axes and broadcast like numpy arrays.
    """

    __slots__ = ("c", "m")
    __array_priority__ = 100

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=float)
        m = c.shape[0].bit_length() - 1
        if c.shape[0] != 1 << m:
            raise ValueError("leading axis must have length 2**m")
        self.c = c
        self.m = m

    @classmethod
    def variable(cls, value, seeds):
        """A coordinate with value ``value`` and seed ``seeds[i]`` on unit ``i``."""
        value = np.asarray(value, dtype=float)
        seeds = [np.asarray(s, dtype=float) for s in seeds]
        shape = np.broadcast_shapes(value.shape, *(s.shape for s in seeds))
        c = np.zeros((1 << len(seeds),) + shape)
        c[0] = value
        for i, s in enumerate(seeds):
            c[1 << i] = s
        return cls(c)

    @property
    def value(self):
        return self.c[0]

    def part(self, mask):
        return self.c[mask]

    def __getitem__(self, key):
        if not isinstance(key, tuple):
            key = (key,)
        return HyperDual(self.c[(slice(None),) + key])

    def __repr__(self):
        return f"HyperDual(m={self.m}, value={self.c[0]!r})"

    # -- arithmetic -------------------------------------------------------

    def _coeffs_of(self, other):
        if isinstance(other, HyperDual):
            if other.m != self.m:
                raise ValueError("mixing hyper-dual numbers of different order")
            return other.c
        other = np.asarray(other, dtype=float)
        c = np.zeros((1 << self.m,) + other.shape)
        c[0] = other
        return c

    def _binary_shapes(self, oc):
        nd = max(self.c.ndim, oc.ndim)
        return _pad(self.c, nd), _pad(oc, nd)

    def __add__(self, other):
        a, b = self._binary_shapes(self._coeffs_of(other))
        return HyperDual(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._binary_shapes(self._coeffs_of(other))
        return HyperDual(a - b)

    def __rsub__(self, other):
        a, b = self._binary_shapes(self._coeffs_of(other))
        return HyperDual(b - a)

    def __neg__(self):
        return HyperDual(-self.c)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, HyperDual):
            s = np.asarray(other, dtype=float)[None]
            a, b = self._binary_shapes(s)
            return HyperDual(a * b)
        a, b = self._binary_shapes(other.c)
        shape = np.broadcast_shapes(a.shape, b.shape)
        out = np.empty(shape)
        for s, (ia, ib) in enumerate(_subset_pairs(self.m)):
            out[s] = np.sum(a[ia] * b[ib], axis=0)
        return HyperDual(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, HyperDual):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, HyperDual):
            raise UnsupportedFunctionError("dual exponents are not supported")
        return self.power(float(p))

    # -- elementary functions --------------------------------------------

    def compose(self, derivs):
        """Apply ``f`` given ``[f(x0), f'(x0), ..., f^(m)(x0)]``."""
        nil = HyperDual(self.c.copy())
        nil.c[0] = 0.0
        out = np.zeros_like(self.c)
        out[0] = derivs[0]
        result = HyperDual(out)
        term = nil
        for k in range(1, self.m + 1):
            result = result + term * (derivs[k] / math.factorial(k))
            if k < self.m:
                term = term * nil
        return result

    def exp(self):
        e = np.exp(self.value)
        return self.compose([e] * (self.m + 1))

    def expm1(self):
        e = np.exp(self.value)
        return self.compose([np.expm1(self.value)] + [e] * self.m)

    def sinh(self):
        s, ch = np.sinh(self.value), np.cosh(self.value)
        return self.compose([s if k % 2 == 0 else ch for k in range(self.m + 1)])

    def cosh(self):
        s, ch = np.sinh(self.value), np.cosh(self.value)
        return self.compose([ch if k % 2 == 0 else s for k in range(self.m + 1)])

    def sin(self):
        x = self.value
        cyc = [np.sin(x), np.cos(x), -np.sin(x), -np.cos(x)]
        return self.compose([cyc[k % 4] for k in range(self.m + 1)])

    def cos(self):
        x = self.value
        cyc = [np.cos(x), -np.sin(x), -np.cos(x), np.sin(x)]
        return self.compose([cyc[k % 4] for k in range(self.m + 1)])

    def power(self, p):
        x = self.value
        derivs = []
        coef = 1.0
        for k in range(self.m + 1):
            derivs.append(coef * x ** (p - k))
            coef *= p - k
        return self.compose(derivs)

    def sqrt(self):
        return self.power(0.5)

    def reciprocal(self):
        return self.power(-1.0)

    def log(self):
        x = self.value
        derivs = [np.log(x)]
        for k in range(1, self.m + 1):
            derivs.append((-1.0) ** (k - 1) * math.factorial(k - 1) / x**k)
        return self.compose(derivs)

    def _atan_derivs(self):
        # d^k/dx^k arctan = Im[(-1)^(k-1) (k-1)! / (x - i)^k]
        z = self.value - 1j
        return [(-1.0) ** (k - 1) * math.factorial(k - 1) * np.imag(z ** (-k))
                for k in range(1, self.m + 1)]

    def arctan(self):
        return self.compose([np.arctan(self.value)] + self._atan_derivs())

    def arccot(self):
        return self.compose([np.arctan2(1.0, self.value)] + [-d for d in self._atan_derivs()])

    # -- numpy interop ----------------------------------------------------

    _UNARY = {
        np.exp: "exp", np.expm1: "expm1", np.sqrt: "sqrt", np.sinh: "sinh",
        np.cosh: "cosh", np.sin: "sin", np.cos: "cos", np.arctan: "arctan",
        np.log: "log", np.reciprocal: "reciprocal", np.negative: "__neg__",
        np.positive: "__pos__",
    }
    _BINARY = {
        np.add: lambda a, b: a + b, np.subtract: lambda a, b: a - b,
        np.multiply: lambda a, b: a * b, np.true_divide: lambda a, b: a / b,
    }

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        if method != "__call__" or kwargs:
            raise UnsupportedFunctionError(f"{ufunc.__name__}.{method} on HyperDual")
        if ufunc in self._UNARY and len(inputs) == 1:
            return getattr(inputs[0], self._UNARY[ufunc])()
        if ufunc in self._BINARY:
            a, b = inputs
            if not isinstance(a, HyperDual):
                if ufunc is np.subtract:
                    return b.__rsub__(a)
                if ufunc is np.true_divide:
                    return b.__rtruediv__(a)
                a, b = b, a
            return self._BINARY[ufunc](a, b)
        if ufunc is np.power and isinstance(inputs[0], HyperDual) and not isinstance(inputs[1], HyperDual):
            return inputs[0] ** inputs[1]
        if ufunc is np.square:
            return inputs[0] * inputs[0]
        raise UnsupportedFunctionError(f"no forward-mode rule for {ufunc.__name__}")


def arccot(x):
    """Principal arccot with values in (0, pi); works on arrays and HyperDual."""
    if isinstance(x, HyperDual):
        return x.arccot()
    return np.arctan2(1.0, np.asarray(x, dtype=float))


class DualResult(NamedTuple):
    value: float
    first: tuple
    second: float | None


def dual_evaluate(f: Callable, point, directions: Sequence):
    """Value, directional first partials and the mixed second partial of ``f``.

    ``point`` is a scalar or a 1-d array; ``f`` receives a HyperDual (scalar
    case) or a list of HyperDual coordinates. With two directions the mixed
    partial along both is returned as ``second`` (pass the same direction
    twice for a plain second derivative).
    """
    if not 1 <= len(directions) <= 4:
        raise DomainError("between one and four directions are supported")
    pt = np.asarray(point, dtype=float)
    if pt.ndim == 0:
        x = HyperDual.variable(pt, [float(np.asarray(d)) for d in directions])
    else:
        dirs = [np.asarray(d, dtype=float) for d in directions]
        x = [HyperDual.variable(pt[i], [d[i] for d in dirs]) for i in range(pt.size)]
    y = f(x)
    if not isinstance(y, HyperDual):
        raise UnsupportedFunctionError("f did not propagate the dual number")
    first = tuple(float(y.c[1 << i]) for i in range(len(directions)))
    second = float(y.c[3]) if len(directions) >= 2 else None
    return DualResult(float(y.c[0]), first, second)


# ---------------------------------------------------------------------------
# Rotations
# ---------------------------------------------------------------------------

def check_rotation(R, tol: float = 1e-12):
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise DomainError(f"rotation must be 3x3, got shape {R.shape}")
    if np.max(np.abs(R @ R.T - np.eye(3))) > tol or abs(np.linalg.det(R) - 1.0) > tol:
        raise DomainError("matrix is not a proper rotation")
    return R


def rotate_tensor(T, R):
    """Return ``R T R^T`` for a proper rotation ``R``."""
    R = check_rotation(R)
    return R @ np.asarray(T, dtype=float) @ R.T
