"""Path determinant functional and the winding invariant.

For a path ``xi`` of invertible matrices on ``[0, 1]`` the functional is

    D(xi) = 1/(2 pi i) * integral of tau(xi'(t) xi(t)^-1) dt

with ``tau`` the normalized trace.  On a straight segment from ``a`` to
``b`` it has the closed form ``tau(log(b a^-1)) / (2 pi i)`` whenever the
segment stays invertible, i.e. whenever ``b a^-1`` has no eigenvalue on the
closed negative real axis.
"""
from dataclasses import dataclass

import numpy as np

from .errors import BranchCutHit, QuadratureStall, SegmentNotInvertible, SpectrumOnBranchCut
from .groups import commutator_product
from .matcore import (
    BRANCH_CUT_TOL,
    as_matrix,
    branch_cut_distance,
    normalized_trace,
    principal_log,
    trace_log,
)

TWO_PI_I = 2j * np.pi
MAX_PANELS = 2 ** 20


@dataclass(frozen=True)
class MatrixPath:
    """Piecewise smooth path ``[0, 1] -> GL_n``.

    ``kind`` is ``"linear"``, ``"sampled"`` (piecewise linear through the
    samples) or ``"smooth"`` (user callables).  Build with the classmethods.
    """
    kind: str
    data: tuple

    @classmethod
    def linear(cls, a, b):
        a, b = as_matrix(a), as_matrix(b)
        if a.shape != b.shape:
            raise ValueError("endpoints differ in size")
        return cls("linear", (a, b))

    @classmethod
    def sampled(cls, samples):
        ts = np.array([float(t) for t, _ in samples])
        mats = [as_matrix(m) for _, m in samples]
        if len(ts) < 2 or ts[0] != 0.0 or ts[-1] != 1.0 or np.any(np.diff(ts) <= 0):
            raise ValueError("sample times must increase strictly from 0 to 1")
        for m in mats:
            if np.linalg.svd(m, compute_uv=False)[-1] <= 1e-10:
                raise SegmentNotInvertible("sample is numerically singular")
        return cls("sampled", (ts, tuple(mats)))

    @classmethod
    def smooth(cls, value, derivative=None, h=1e-5, breakpoints=(0.0, 1.0)):
        """``derivative`` defaults to a fourth-order centered difference.

        ``breakpoints`` marks kinks so quadrature never straddles one.
        """
        if derivative is None:
            def derivative(t):
                return (8 * (value(t + h) - value(t - h)) - (value(t + 2 * h) - value(t - 2 * h))) / (12 * h)
        bps = tuple(float(b) for b in breakpoints)
        if bps[0] != 0.0 or bps[-1] != 1.0 or any(y <= x for x, y in zip(bps, bps[1:])):
            raise ValueError("breakpoints must increase strictly from 0 to 1")
        return cls("smooth", (value, derivative, bps))

    @property
    def breakpoints(self):
        if self.kind == "sampled":
            return tuple(self.data[0])
        if self.kind == "smooth":
            return self.data[2]
        return (0.0, 1.0)

    def _piece(self, t):
        ts = self.data[0]
        return min(max(int(np.searchsorted(ts, t, side="right")) - 1, 0), len(ts) - 2)

    def value(self, t):
        if self.kind == "linear":
            a, b = self.data
            return (1.0 - t) * a + t * b
        if self.kind == "sampled":
            ts, mats = self.data
            i = self._piece(t)
            s = (t - ts[i]) / (ts[i + 1] - ts[i])
            return (1.0 - s) * mats[i] + s * mats[i + 1]
        return as_matrix(self.data[0](t))

    def derivative(self, t):
        if self.kind == "linear":
            a, b = self.data
            return b - a
        if self.kind == "sampled":
            ts, mats = self.data
            i = self._piece(t)
            return (mats[i + 1] - mats[i]) / (ts[i + 1] - ts[i])
        return as_matrix(self.data[1](t))

    def __mul__(self, other):
        """Pointwise product, with the product rule for the derivative."""
        return MatrixPath.smooth(
            lambda t: self.value(t) @ other.value(t),
            lambda t: self.derivative(t) @ other.value(t) + self.value(t) @ other.derivative(t),
            breakpoints=sorted(set(self.breakpoints) | set(other.breakpoints)),
        )

    def reparameterized(self, phi, dphi):
        """``xi(phi(t))`` for an increasing bijection ``phi`` of [0, 1]."""
        return MatrixPath.smooth(
            lambda t: self.value(phi(t)),
            lambda t: dphi(t) * self.derivative(phi(t)),
        )


def log_derivative_trace(path, t):
    """``tau(xi'(t) xi(t)^-1)``, computed as ``tau(xi^-1 xi')``."""
    x = path.value(t)
    return normalized_trace(np.linalg.solve(x, path.derivative(t)))


def _adaptive_simpson(f, a, b, tol, budget):
    """Adaptive Simpson with Richardson correction; returns (integral, panels)."""
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, tol)]
    total = 0.0
    panels = 0
    while stack:
        a, b, fa, fm, fb, whole, eps = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4 * frm + fb)
        err = left + right - whole
        panels += 1
        if panels > budget:
            raise QuadratureStall(f"more than {budget} panels")
        if abs(err) <= 15 * eps or b - a < 1e-12:
            total += left + right + err / 15.0
        else:
            stack.append((a, m, fa, flm, fm, left, 0.5 * eps))
            stack.append((m, b, fm, frm, fb, right, 0.5 * eps))
    return total, panels


def dhs_quadrature(path, tolerance=1e-10, full=False):
    """Path functional by adaptive quadrature of ``tau(xi' xi^-1)``.

    Returns the real part; with ``full=True`` returns ``(complex value,
    panel count)`` instead.
    """
    bps = path.breakpoints
    total = 0.0
    panels = 0
    share = tolerance * 2 * np.pi / (len(bps) - 1)
    for lo, hi in zip(bps[:-1], bps[1:]):
        mid = 0.5 * (lo + hi)
        # evaluate strictly inside each piece so sampled paths use one slope
        eps = 1e-14 * (hi - lo)

        def f(t, lo=lo, hi=hi, mid=mid):
            return log_derivative_trace(path, min(max(t, lo + eps), hi - eps))

        val, n = _adaptive_simpson(f, lo, hi, share, MAX_PANELS - panels)
        total += val
        panels += n
    value = complex(total / TWO_PI_I)
    return (value, panels) if full else value.real


def dhs_linear(a, b, full=False):
    """Closed form of the functional on the segment from ``a`` to ``b``.

    Returns the real part, or the complex value with ``full=True``.
    Raises :class:`SegmentNotInvertible` if ``b a^-1`` has an eigenvalue on
    (or within 1e-12 of) the closed negative real axis; then some point of
    the segment is singular.
    """
    a, b = as_matrix(a), as_matrix(b)
    if a.shape == b.shape and np.array_equal(a, b):
        return 0j if full else 0.0
    x = np.linalg.solve(a.T, b.T).T
    dist = branch_cut_distance(np.linalg.eigvals(x))
    if dist < BRANCH_CUT_TOL:
        raise SegmentNotInvertible(
            f"b a^-1 has spectrum within {dist:.3e} of (-inf, 0]; use dhs_quadrature on a detour")
    value = complex(normalized_trace(principal_log(x)) / TWO_PI_I)
    return value if full else value.real


def winding_invariant(t, full=False):
    """``tau(log prod [u_i, v_i]) / (2 pi i)`` for a unitary tuple."""
    p = commutator_product(t)
    dist = float(np.min(np.abs(np.linalg.eigvals(p) + 1.0)))
    if dist < 1e-10:
        raise BranchCutHit(dist)
    try:
        value = complex(trace_log(p) / TWO_PI_I)
    except SpectrumOnBranchCut as exc:
        raise BranchCutHit(exc.distance) from None
    if not full and abs(value.imag) > 1e-12:
        raise ArithmeticError(f"winding invariant has imaginary part {value.imag:.3e}")
    return value if full else value.real
