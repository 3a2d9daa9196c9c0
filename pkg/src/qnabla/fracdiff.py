"""Fractional-order q-difference operators on finite sequence windows.

The forward operator of order gamma acts as the causal (lower triangular
Toeplitz) convolution ``h_j = sum_{k<=j} c_{j-k} g_k`` with symbol
coefficients generated by the multiplicative recurrence

    c_0 = 1,    c_{k+1} = -c_k * q^k * [gamma - k]_q / [k + 1]_q,

which is algebraically the same as
``c_k = (-1)^k q^{k(k-1)/2} [gamma]_q [gamma-1]_q ... [gamma-k+1]_q / [k]_q!``
but avoids gamma-function pole arithmetic and accumulates less rounding
error.  For integer gamma = r the recurrence hits ``[0]_q = 0`` and every
coefficient past index r is exactly zero, recovering the classical
q-difference operator of order r (order 1 is the plain backward difference
``g_j - g_{j-1}``).

The inverse operator carries the rising-product coefficients

    e_0 = 1,    e_{k+1} = e_k * [gamma + k]_q / [k + 1]_q,

deliberately with no ``q^{k(k-1)/2}`` twist.  The asymmetry is not a typo:
the two generating functions are ``prod_j (1 - q^j x) / (1 - q^{gamma+j} x)``
and its reciprocal (q-binomial theorem), so the streams convolve exactly to
the unit impulse.  ``verify_inverse`` measures that identity on a window,
and ``semigroup_defect`` measures how far composing two forward operators
is from the forward operator of the summed order (for q < 1 they genuinely
differ; the defect vanishes as q -> 1^-).

Coefficient truncation length is caller-supplied: forward coefficients
decay geometrically at rate q^gamma, but inverse coefficients tend to a
nonzero constant, so no single tail policy fits both.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .qcore import QParam, _require_finite, q_integer

__all__ = [
    "Kind",
    "CoeffStream",
    "SeqWindow",
    "MismatchedParameter",
    "forward_coeffs",
    "inverse_coeffs",
    "apply_forward",
    "apply_inverse",
    "compose_coeffs",
    "verify_inverse",
    "semigroup_defect",
    "toeplitz_matrix",
]


class MismatchedParameter(ValueError):
    """Two coefficient streams with different deformation parameters were combined."""


class Kind(enum.Enum):
    FORWARD = "forward"
    INVERSE = "inverse"
    COMPOSED = "composed"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CoeffStream:
    """Finite prefix of operator coefficients; realizes a causal Toeplitz operator.

    ``order`` is None for streams produced by composition, which carry no
    single operator order of their own.
    """

    order: float | None
    qp: QParam
    kind: Kind
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=np.float64)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coeffs must be a nonempty one-dimensional array")
        if not np.all(np.isfinite(c)):
            raise ValueError("coeffs must be finite")
        object.__setattr__(self, "coeffs", _readonly(c))

    @property
    def truncation(self) -> int:
        """Largest retained lag K; the stream holds coefficients 0..K."""
        return self.coeffs.size - 1


@dataclass(frozen=True)
class SeqWindow:
    """Finite prefix (g_0, ..., g_{N-1}) of a sequence; entries at negative
    indices are implicitly zero."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.atleast_1d(np.array(self.values, dtype=np.float64))
        if v.ndim != 1 or v.size < 1:
            raise ValueError("window must be ≥ 1")
        if not np.all(np.isfinite(v)):
            raise ValueError("window entries must be finite")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def n(self) -> int:
        return self.values.size

    def prefix(self, n: int) -> "SeqWindow":
        if not 1 <= n <= self.n:
            raise ValueError(f"prefix length must be in [1, {self.n}], got {n}")
        return SeqWindow(self.values[:n])


def _check_truncation(k: int) -> int:
    if k != int(k) or k < 0:
        raise ValueError(f"truncation length must be a nonnegative integer, got {k!r}")
    return int(k)


def forward_coeffs(order: float, qp: QParam, k: int) -> CoeffStream:
    """Coefficients c_0..c_K of the order-``order`` forward operator."""
    order = _require_finite("order", order)
    k = _check_truncation(k)
    c = np.empty(k + 1, dtype=np.float64)
    c[0] = 1.0
    qpow = 1.0
    for i in range(k):
        c[i + 1] = -c[i] * qpow * q_integer(order - i, qp) / q_integer(i + 1.0, qp)
        qpow *= qp.q
    return CoeffStream(order=order, qp=qp, kind=Kind.FORWARD, coeffs=c)


def inverse_coeffs(order: float, qp: QParam, k: int) -> CoeffStream:
    """Coefficients e_0..e_K of the order-``order`` inverse operator.

    All entries are nonnegative for order > 0 and tend to the finite
    constant prod_j (1 - q^{order+j}) / (1 - q^{1+j}) as K grows.
    """
    order = _require_finite("order", order)
    k = _check_truncation(k)
    e = np.empty(k + 1, dtype=np.float64)
    e[0] = 1.0
    for i in range(k):
        e[i + 1] = e[i] * q_integer(order + i, qp) / q_integer(i + 1.0, qp)
    return CoeffStream(order=order, qp=qp, kind=Kind.INVERSE, coeffs=e)


def _apply(stream: CoeffStream, g: SeqWindow) -> SeqWindow:
    # Direct triangular convolution; windows are desk-scale, so the simple
    # O(N^2) path stays bit-reproducible.
    return SeqWindow(np.convolve(stream.coeffs, g.values)[: g.n])


def apply_forward(g: SeqWindow, order: float, qp: QParam) -> SeqWindow:
    """Forward transform h_j = sum_{k<=j} c_{j-k} g_k over the window."""
    return _apply(forward_coeffs(order, qp, g.n - 1), g)


def apply_inverse(h: SeqWindow, order: float, qp: QParam) -> SeqWindow:
    """Inverse transform g_j = sum_{k<=j} e_{j-k} h_k over the window."""
    return _apply(inverse_coeffs(order, qp, h.n - 1), h)


def compose_coeffs(a: CoeffStream, b: CoeffStream) -> CoeffStream:
    """Cauchy convolution of two symbols, truncated to the shorter stream.

    This is the coefficient stream of the composed operator; both streams
    must share the same deformation parameter.
    """
    if a.qp.q != b.qp.q:
        raise MismatchedParameter(
            f"cannot compose streams with q = {a.qp.q!r} and q = {b.qp.q!r}"
        )
    n = min(a.coeffs.size, b.coeffs.size)
    out = np.convolve(a.coeffs, b.coeffs)[:n]
    return CoeffStream(order=None, qp=a.qp, kind=Kind.COMPOSED, coeffs=out)


def verify_inverse(order: float, qp: QParam, n: int) -> float:
    """Max residual of (forward * inverse) against the unit impulse on lags < n.

    Both convolution orderings are evaluated and the larger residual is
    returned; they coincide mathematically, so a gap between them would
    itself flag a defect.
    """
    if n != int(n) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    c = forward_coeffs(order, qp, n - 1).coeffs
    e = inverse_coeffs(order, qp, n - 1).coeffs
    target = np.zeros(n, dtype=np.float64)
    target[0] = 1.0
    r1 = float(np.max(np.abs(np.convolve(c, e)[:n] - target)))
    r2 = float(np.max(np.abs(np.convolve(e, c)[:n] - target)))
    return max(r1, r2)


def semigroup_defect(mu: float, nu: float, qp: QParam, n: int) -> float:
    """Max coefficient gap between (order mu) ∘ (order nu) and order mu + nu.

    Strictly positive in general for q < 1: composing two forward operators
    is not the forward operator of the summed order.
    """
    mu = _require_finite("mu", mu)
    nu = _require_finite("nu", nu)
    if n != int(n) or n < 2:
        raise ValueError(f"n must be an integer ≥ 2, got {n!r}")
    n = int(n)
    composed = np.convolve(
        forward_coeffs(mu, qp, n - 1).coeffs, forward_coeffs(nu, qp, n - 1).coeffs
    )[:n]
    direct = forward_coeffs(mu + nu, qp, n - 1).coeffs
    return float(np.max(np.abs(composed - direct)))


def toeplitz_matrix(stream: CoeffStream, n: int) -> np.ndarray:
    """Dense n-by-n lower triangular Toeplitz window of a coefficient stream.

    Entry (j, k) is coefficient j - k; lags beyond the stream's truncation
    are zero.
    """
    if n != int(n) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    out = np.zeros((n, n), dtype=np.float64)
    c = stream.coeffs
    for lag in range(min(n, c.size)):
        idx = np.arange(n - lag)
        out[idx + lag, idx] = c[lag]
    return out
