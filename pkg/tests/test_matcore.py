import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from quasirep.errors import SingularInput, SpectralGapTooSmall, SpectrumOnBranchCut
from quasirep.groups import make_rng, random_unitary
from quasirep.matcore import (
    as_matrix,
    functional_calculus_normal,
    is_unitary,
    normalized_trace,
    operator_norm,
    polar_unitary,
    principal_log,
    riesz_half_plane,
    trace_log,
)


def rand_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_trace_of_identity_is_one():
    assert normalized_trace(np.eye(4)) == 1.0


def test_trace_of_cube_roots_vanishes():
    w = np.exp(2j * np.pi / 3)
    assert abs(normalized_trace(np.diag([1, w, w * w]))) < 1e-15


def test_trace_is_tracial():
    rng = make_rng(1)
    a, b = rand_complex(rng, 8), rand_complex(rng, 8)
    assert abs(normalized_trace(a @ b) - normalized_trace(b @ a)) < 1e-13


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2 ** 32 - 1))
def test_trace_property(n, seed):
    rng = make_rng(seed)
    a, b = rand_complex(rng, n), rand_complex(rng, n)
    bound = 1e-12 * operator_norm(a) * operator_norm(b)
    assert abs(normalized_trace(a @ b) - normalized_trace(b @ a)) <= bound


def test_as_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        as_matrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        as_matrix(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        as_matrix(np.zeros((0, 0)))


def test_operator_norm_examples():
    assert operator_norm(np.eye(3)) == pytest.approx(1.0, abs=1e-15)
    assert operator_norm(np.diag([3.0, -1.0])) == pytest.approx(3.0, abs=1e-15)
    m = rand_complex(make_rng(2), 6)
    top = np.linalg.eigvalsh(m.conj().T @ m)[-1]
    assert abs(operator_norm(m) ** 2 - top) < 1e-10


def test_principal_log_examples():
    assert np.abs(principal_log(np.eye(3))).max() < 1e-15
    z = np.exp(2j * np.pi * 0.2)
    assert np.abs(principal_log(z * np.eye(3)) - 2j * np.pi * 0.2 * np.eye(3)).max() < 1e-14


def test_principal_log_round_trip_unitary():
    rng = make_rng(3)
    # eigenphases kept inside (-0.9 pi, 0.9 pi), away from -1
    q = random_unitary(10, rng)
    phases = rng.uniform(-0.9 * np.pi, 0.9 * np.pi, 10)
    u = q @ np.diag(np.exp(1j * phases)) @ q.conj().T
    L = principal_log(u)
    assert np.abs(sla.expm(L) - u).max() < 1e-11
    assert np.all(np.abs(np.linalg.eigvals(L).imag) < np.pi)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_log_inverts_exp(n, seed):
    rng = make_rng(seed)
    # eigenvalue imaginary parts in (-pi + 0.1, pi - 0.1), real parts small
    q = random_unitary(n, rng)
    lam = rng.uniform(-0.5, 0.5, n) + 1j * rng.uniform(-np.pi + 0.1, np.pi - 0.1, n)
    x = q @ np.diag(lam) @ q.conj().T
    assert np.abs(principal_log(sla.expm(x)) - x).max() < 1e-10


def test_principal_log_rejects_branch_cut():
    with pytest.raises(SpectrumOnBranchCut) as err:
        principal_log(np.diag([1.0, -1.0]))
    assert err.value.distance < 1e-12
    with pytest.raises(SpectrumOnBranchCut):
        trace_log(np.diag([1.0, 0.0]))


def test_trace_log_matches_log_trace():
    rng = make_rng(4)
    u = random_unitary(6, rng)
    u = sla.expm(0.3 * (u - u.conj().T))
    assert abs(trace_log(u) - normalized_trace(principal_log(u))) < 1e-13


def check_riesz(rp, m):
    P = rp.projector
    assert np.abs(P @ P - P).max() < 1e-10
    assert np.abs(P @ m - m @ P).max() <= 1e-10 * max(operator_norm(m), 1.0)
    assert rp.gap > 0
    assert abs(rp.trace - rp.rank) < 1e-10


def test_riesz_diagonal():
    rp = riesz_half_plane(np.diag([0.05, 0.95]))
    assert np.abs(rp.projector - np.diag([0, 1])).max() < 1e-14
    assert rp.rank == 1


def test_riesz_of_nonnormal_idempotent_is_itself():
    a = np.array([[1.0, 1.0], [0.0, 0.0]])
    rp = riesz_half_plane(a)
    assert np.abs(rp.projector - a).max() < 1e-14
    check_riesz(rp, a)


def eig_oracle(m):
    lam, V = np.linalg.eig(m)
    return V @ np.diag((lam.real > 0.5).astype(float)) @ np.linalg.inv(V)


def test_riesz_matches_eigenbasis_oracle():
    rng = make_rng(5)
    S = np.eye(3) + 0.3 * rand_complex(rng, 3)
    m = S @ np.diag([0.02, 0.97, 1.01]) @ np.linalg.inv(S)
    rp = riesz_half_plane(m)
    assert rp.rank == 2
    assert np.abs(rp.projector - eig_oracle(m)).max() < 1e-10
    check_riesz(rp, m)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2 ** 32 - 1))
def test_riesz_invariants_near_idempotent(n, seed):
    rng = make_rng(seed)
    k = int(rng.integers(0, n + 1))
    d = np.r_[np.ones(k), np.zeros(n - k)] + 0.05 * rand_complex(rng, n).diagonal()
    S = np.eye(n) + 0.2 * rand_complex(rng, n)
    m = S @ np.diag(d) @ np.linalg.inv(S) + 1e-3 * rand_complex(rng, n)
    rp = riesz_half_plane(m)
    assert rp.rank == int(np.sum(np.linalg.eigvals(m).real > 0.5))
    check_riesz(rp, m)


def test_riesz_gap_error_reports_gap():
    with pytest.raises(SpectralGapTooSmall) as err:
        riesz_half_plane(np.diag([0.5, 1.0]))
    assert err.value.gap < 1e-8


def test_polar_examples():
    u = random_unitary(5, make_rng(6))
    assert np.abs(polar_unitary(u) - u).max() < 1e-12
    assert np.abs(polar_unitary(np.diag([2.0, 0.5])) - np.eye(2)).max() < 1e-15
    m = rand_complex(make_rng(7), 7)
    U = polar_unitary(m)
    assert np.abs(m - U @ sla.sqrtm(m.conj().T @ m)).max() < 1e-10
    with pytest.raises(SingularInput):
        polar_unitary(np.diag([1.0, 0.0]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.floats(0.0, 6.0), st.integers(0, 2 ** 32 - 1))
def test_polar_output_unitary(n, logcond, seed):
    rng = make_rng(seed)
    s = np.logspace(0, -logcond, n)
    m = random_unitary(n, rng) @ np.diag(s) @ random_unitary(n, rng)
    U = polar_unitary(m)
    assert operator_norm(U.conj().T @ U - np.eye(n)) <= 1e-12
    assert is_unitary(U)


def test_functional_calculus_repeated_eigenvalues():
    u = np.diag(np.exp(2j * np.pi * np.array([0.1, 0.1, 0.7])))
    q = random_unitary(3, make_rng(8))
    m = q @ u @ q.conj().T
    out = functional_calculus_normal(m, lambda z: z.conj())
    assert np.abs(out - m.conj().T).max() < 1e-13
