"""Dense complex matrices with the normalized trace.

Matrices are plain square ``complex128`` ndarrays; the tracial state is
``trace / dim``, so the identity always has trace exactly one.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import SingularInput, SpectralGapTooSmall, SpectrumOnBranchCut

SPECTRAL_GAP = 1e-8
BRANCH_CUT_TOL = 1e-12


def as_matrix(m):
    """Validate and return ``m`` as a square, finite complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def normalized_trace(m):
    a = as_matrix(m)
    return complex(np.trace(a) / a.shape[0])


def operator_norm(m):
    """Largest singular value."""
    return float(np.linalg.norm(as_matrix(m), 2))


def is_unitary(m, tol=1e-12):
    a = as_matrix(m)
    return operator_norm(a.conj().T @ a - np.eye(a.shape[0])) <= tol


def branch_cut_distance(eigenvalues):
    """Smallest distance from ``eigenvalues`` to the ray (-inf, 0]."""
    z = np.atleast_1d(np.asarray(eigenvalues, dtype=complex))
    d = np.where(z.real <= 0.0, np.abs(z.imag), np.abs(z))
    return float(d.min())


def principal_log(m):
    """Principal matrix logarithm.

    Raises :class:`SpectrumOnBranchCut` if an eigenvalue lies within
    ``BRANCH_CUT_TOL`` of the closed negative real axis.
    """
    a = as_matrix(m)
    dist = branch_cut_distance(np.linalg.eigvals(a))
    if dist < BRANCH_CUT_TOL:
        raise SpectrumOnBranchCut(dist)
    return np.asarray(sla.logm(a), dtype=complex)


def trace_log(m):
    """``normalized_trace(principal_log(m))`` via the spectrum.

    The trace of a holomorphic function of a matrix only depends on the
    eigenvalues, so this avoids forming the logarithm.
    """
    a = as_matrix(m)
    ev = np.linalg.eigvals(a)
    dist = branch_cut_distance(ev)
    if dist < BRANCH_CUT_TOL:
        raise SpectrumOnBranchCut(dist)
    return complex(np.log(ev).sum() / a.shape[0])


@dataclass(frozen=True)
class RieszProjector:
    source: np.ndarray
    projector: np.ndarray
    gap: float
    rank: int

    @property
    def trace(self):
        return float(np.trace(self.projector).real)


def half_plane_gap(m):
    ev = np.linalg.eigvals(as_matrix(m))
    return float(np.min(np.abs(ev.real - 0.5)))


def riesz_half_plane(m, threshold=SPECTRAL_GAP):
    """Riesz idempotent for the part of the spectrum in ``Re z > 1/2``.

    Uses an ordered complex Schur form ``m = Z T Z*`` with the selected
    eigenvalues leading, then decouples the two diagonal blocks with a
    Sylvester solve.  Works for non-normal inputs.
    """
    a = as_matrix(m)
    n = a.shape[0]
    T, Z, k = sla.schur(a, output="complex", sort=lambda z: z.real > 0.5)
    gap = float(np.min(np.abs(np.diag(T).real - 0.5)))
    if gap <= threshold:
        raise SpectralGapTooSmall(gap, threshold)
    PT = np.zeros((n, n), dtype=complex)
    if 0 < k < n:
        # T11 Y - Y T22 = T12 makes [[I, Y], [0, 0]] commute with T
        Y = sla.solve_sylvester(T[:k, :k], -T[k:, k:], T[:k, k:])
        PT[:k, k:] = Y
    PT[:k, :k] = np.eye(k)
    P = Z @ PT @ Z.conj().T
    return RieszProjector(source=a, projector=P, gap=gap, rank=int(k))


def polar_unitary(m):
    """Unitary factor ``U`` of the polar decomposition ``m = U |m|``."""
    a = as_matrix(m)
    smin = np.linalg.svd(a, compute_uv=False)[-1]
    if smin < 1e-12:
        raise SingularInput(f"smallest singular value {smin:.3e} < 1e-12")
    U, _ = sla.polar(a, side="right")
    return U


def functional_calculus_normal(m, func):
    """Apply a scalar function to a normal matrix through its Schur form.

    For normal matrices the complex Schur form is diagonal, so this is a
    unitary diagonalization even with repeated eigenvalues.
    """
    a = as_matrix(m)
    T, Z = sla.schur(a, output="complex")
    vals = func(np.diag(T))
    return (Z * vals) @ Z.conj().T
