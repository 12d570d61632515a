"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""
import time

import numpy as np
import scipy.linalg as sla

from quasirep.determinant import MatrixPath, dhs_linear, dhs_quadrature, winding_invariant
from quasirep.groups import (
    UnitaryTuple,
    alpha,
    beta,
    build_surface_group,
    clock_shift_tuple,
    commutator_defect,
    identity_tuple,
    identity_word,
    make_rng,
    perturbed_commuting_tuple,
    random_unitary,
    twisted_genus_tuple,
)
from quasirep.ktheory import (
    boundary_integral_check,
    e_pi_local,
    idempotency_residual,
    kappa_invariant,
    pushforward_local,
    sample_points,
    simplicial_pushforward,
    surface_data,
)
from quasirep.matcore import operator_norm, polar_unitary, principal_log, riesz_half_plane
from quasirep.surface import cocycle_defect_word

RESULTS = {}


def record(num, title, ok, detail):
    line = f"criterion {num} [{title}]: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS[num] = line
    print(line)
    return ok


def clock_shift_cases():
    return [(n, p) for n in range(3, 17) for p in range(1, n) if 2 * p < n]


PERTURBED = [(0.002 * (i + 1), 1000 + i) for i in range(50)]


# ---------------------------------------------------------------------------

def test_criterion_1_nc_torus():
    worst, slowest = 0.0, 0.0
    for n, p in clock_shift_cases():
        t0 = time.perf_counter()
        w = winding_invariant(clock_shift_tuple(n, p))
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, abs(w + p / n))
    ok = worst <= 1e-10 and slowest < 1.0
    assert record(1, "NC torus W = -p/n", ok,
                  f"{len(clock_shift_cases())} cases, max |W + p/n| = {worst:.1e} <= 1e-10, "
                  f"slowest case {slowest * 1e3:.2f} ms < 1 s")


def _s_minus_w(t):
    c, labels = surface_data(t.genus)
    s, _ = simplicial_pushforward(c, labels, t)
    return abs(s - winding_invariant(t))


def test_criterion_2_main_equality():
    t0 = time.perf_counter()
    a = max(_s_minus_w(clock_shift_tuple(n, 1)) for n in range(3, 17))
    b = max(_s_minus_w(twisted_genus_tuple(g, 8, p)) for g in (2, 3) for p in (1, 3))
    c = max(_s_minus_w(perturbed_commuting_tuple(1, 10, m, s)) for m, s in PERTURBED)
    elapsed = time.perf_counter() - t0
    ok = max(a, b, c) <= 1e-8 and elapsed < 10
    assert record(2, "|S - W| <= 1e-8", ok,
                  f"(a) {a:.1e}, (b) {b:.1e}, (c) {c:.1e} over 50 tuples; total {elapsed:.2f} s < 10 s")


def test_criterion_2_all_phases():
    # wider than the criterion: every p with 0 < p/n < 1/2
    worst = max(_s_minus_w(clock_shift_tuple(n, p)) for n, p in clock_shift_cases())
    assert worst <= 1e-8


def test_criterion_3_kappa():
    worst, wrong = 0.0, []
    cases = [clock_shift_tuple(n, 1) for n in range(3, 17)]
    cases += [perturbed_commuting_tuple(1, 10, m, s) for m, s in PERTURBED]
    for t in cases:
        k = kappa_invariant(t.u(1), t.v(1))
        target = t.dim * winding_invariant(t)
        worst = max(worst, abs(k.value - target))
        if k.integer != round(target):
            wrong.append(t.family)
    quarter = [(n, p) for n, p in clock_shift_cases() if 4 * p <= n]
    off = [(n, p) for n, p in quarter
           if kappa_invariant(*clock_shift_tuple(n, p).unitaries).integer != -p]
    ok = worst <= 1e-6 and not wrong and not off
    assert record(3, "kappa = dim W", ok,
                  f"max |kappa - dim W| = {worst:.1e} on 2(a)+2(c); kappa = -p on "
                  f"{len(quarter) - len(off)}/{len(quarter)} clock/shift cases with p/n <= 1/4")


def _random_tuple(rng, i):
    kind = i % 3
    if kind == 0:
        g, n = int(rng.integers(1, 4)), int(rng.integers(2, 13))
        return perturbed_commuting_tuple(g, n, float(rng.uniform(0, 0.2)), i)
    if kind == 1:
        n = int(rng.integers(6, 30))
        p = int(rng.integers(0, n // 6 + 1))
        g = int(rng.integers(1, 4))
        t = twisted_genus_tuple(g, n, p)
        return t.conjugated(random_unitary(n, rng))
    # random unitaries close to each other
    g, n = int(rng.integers(1, 3)), int(rng.integers(2, 9))
    base = random_unitary(n, rng)
    mats = []
    for _ in range(2 * g):
        h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        mats.append(polar_unitary(base @ sla.expm(0.1 * (h - h.conj().T))))
    return UnitaryTuple(g, tuple(mats), "random")


def test_criterion_4_quantization():
    rng = make_rng(2024)
    count, worst, i = 0, 0.0, 0
    while count < 1000:
        t = _random_tuple(rng, i)
        i += 1
        if commutator_defect(t) >= 1:
            continue
        q = t.dim * winding_invariant(t)
        worst = max(worst, abs(q - round(q)))
        count += 1
    ok = worst <= 1e-8
    assert record(4, "dim W integral", ok, f"{count} tuples with defect < 1, max distance {worst:.1e}")


def _skew(rng, n, scale):
    h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = h - h.conj().T
    return scale * h / np.linalg.norm(h, 2)


def _path(rng, n=4):
    k1, k2 = _skew(rng, n, 0.4), _skew(rng, n, 0.4)

    def value(t):
        return sla.expm(t * k1) @ sla.expm(t * t * k2)

    def deriv(t):
        e1, e2 = sla.expm(t * k1), sla.expm(t * t * k2)
        return k1 @ e1 @ e2 + e1 @ (2 * t * k2) @ e2

    return MatrixPath.smooth(value, deriv)


def test_criterion_5_determinant():
    rng = make_rng(55)
    phi = lambda t: t + 0.3 * t * (1 - t)  # noqa: E731
    dphi = lambda t: 1 + 0.3 * (1 - 2 * t)  # noqa: E731
    add, rep, lin = 0.0, 0.0, 0.0
    for _ in range(100):
        p1, p2 = _path(rng), _path(rng)
        d1 = dhs_quadrature(p1, full=True)[0]
        d2 = dhs_quadrature(p2, full=True)[0]
        add = max(add, abs(dhs_quadrature(p1 * p2, full=True)[0] - d1 - d2))
        rep = max(rep, abs(dhs_quadrature(p1.reparameterized(phi, dphi), full=True)[0] - d1))
        a = random_unitary(4, rng)
        b = sla.expm(_skew(rng, 4, 0.8)) @ a
        lin = max(lin, abs(dhs_linear(a, b, full=True)
                           - dhs_quadrature(MatrixPath.linear(a, b), full=True)[0]))
    loop = MatrixPath.smooth(lambda t: np.exp(2j * np.pi * t) * np.eye(3),
                             lambda t: 2j * np.pi * np.exp(2j * np.pi * t) * np.eye(3))
    lp = abs(dhs_quadrature(loop) - 1)
    ok = add <= 1e-9 and rep <= 1e-9 and lin <= 1e-9 and lp <= 1e-10
    assert record(5, "determinant suite", ok,
                  f"additivity {add:.1e}, reparameterization {rep:.1e}, closed form vs "
                  f"quadrature {lin:.1e}, loop {lp:.1e}")


def test_criterion_6_locality():
    details, ok = [], True
    for g in (1, 2, 3):
        c, labels = surface_data(g)
        for n, p in ((8, 1), (5, 2)):
            t = twisted_genus_tuple(g, n, p)
            _, terms = simplicial_pushforward(c, labels, t)
            big = [i for i, x in enumerate(terms) if abs(x) > 1e-12]
            w = winding_invariant(t)
            ok &= big == [c.exceptional_triangle] and abs(terms[big[0]] - w) <= 1e-12
        details.append(f"g={g}: only simplex {c.exceptional_triangle}")
    assert record(6, "exceptional-simplex locality", ok, "; ".join(details))


def test_criterion_7_bundle():
    res_id = 0.0
    for g in (1, 2):
        c, labels = surface_data(g)
        t = identity_tuple(g, 3)
        for tri, pt in sample_points(c, 100, g):
            res_id = max(res_id, idempotency_residual(e_pi_local(c, labels, t, tri, pt)))
    c, labels = surface_data(1)
    t = clock_shift_tuple(8, 1)
    d = commutator_defect(t)
    pts = sample_points(c, 100, 8)
    res_e = max(idempotency_residual(e_pi_local(c, labels, t, tri, pt)) for tri, pt in pts)
    # the push-forward is only far from idempotent inside the exceptional simplex
    pts_p = pts + [(c.exceptional_triangle, np.full(3, 1 / 3))]
    res_p = max(idempotency_residual(pushforward_local(c, labels, t, tri, pt)) for tri, pt in pts_p)
    bnd = 0.0
    for tup in (clock_shift_tuple(8, 1), twisted_genus_tuple(2, 8, 1), twisted_genus_tuple(3, 8, 3)):
        c, labels = surface_data(tup.genus)
        bnd = max(bnd, max(boundary_integral_check(c, labels, tup, k) for k in range(len(c.triangles))))
    ok = res_id <= 1e-12 and res_e <= 3 * d and res_p <= 3 * d and bnd <= 1e-9
    assert record(7, "bundle checks", ok,
                  f"identity residual {res_id:.1e}; clock/shift(8,1) e_pi {res_e:.1e}, pi(e) "
                  f"{res_p:.1e} vs 3*defect {3 * d:.3f}; boundary integrals {bnd:.1e}")


def _label_table_ok(c, labels):
    g = c.genus
    sg = build_surface_group(g)
    lift = {}
    for e, pairs in c.edge_lifts.items():
        for x, y in pairs:
            lift[(x, y)] = labels[e]
            lift[(y, x)] = labels[e].inverse()
    one = identity_word(g)
    for k in range(1, g + 1):
        fam = sg.families[k]
        want = {(f"a1^{k}", f"w0^{k}"): alpha(g, k, -1), (f"a1^{k}", f"w1^{k}"): alpha(g, k, -1),
                (f"a2^{k}", f"w1^{k}"): alpha(g, k, -1), (f"b1^{k}", f"w0^{k % g + 1}"): beta(g, k, -1),
                (f"b2^{k}", f"w3^{k}"): beta(g, k, -1), (f"a1^{k}", f"a2^{k}"): one,
                (f"b2^{k}", f"b1^{k}"): one, (f"w0^{k}", f"w1^{k}"): one,
                (f"v0^{k}", f"w0^{k}"): fam[2],
                (f"v1^{k}", f"w1^{k}"): sg.section_image(fam[5]),
                (f"v2^{k}", f"w2^{k}"): fam[4], (f"v3^{k}", f"w3^{k}"): fam[3],
                (f"v0^{k}", f"a1^{k}"): fam[2] * alpha(g, k)}
        for key, word in want.items():
            if lift.get(key) != word:
                return False
    return True


def test_criterion_8_structure():
    euler = all(surface_data(g)[0].euler_characteristic == 2 - 2 * g for g in range(1, 6))
    table = all(_label_table_ok(*surface_data(g)) for g in range(1, 6))
    abel = all(not np.any(cocycle_defect_word(labels, tri).abelianization())
               for g in range(1, 6) for c, labels in [surface_data(g)] for tri in c.triangles)
    rng = make_rng(88)
    core = True
    for _ in range(50):
        n = int(rng.integers(2, 9))
        S = np.eye(n) + 0.2 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        d = (rng.uniform(size=n) > 0.5) + 0.05 * rng.standard_normal(n)
        m = S @ np.diag(d) @ np.linalg.inv(S)
        rp = riesz_half_plane(m)
        P = rp.projector
        core &= np.abs(P @ P - P).max() <= 1e-10
        core &= np.abs(P @ m - m @ P).max() <= 1e-10 * operator_norm(m)
        core &= rp.rank == int(np.sum(d > 0.5))
        q = random_unitary(n, rng)
        x = q @ np.diag(1j * rng.uniform(-np.pi + 0.1, np.pi - 0.1, n)) @ q.conj().T
        core &= np.abs(principal_log(sla.expm(x)) - x).max() <= 1e-10
        U = polar_unitary(S)
        core &= operator_norm(U.conj().T @ U - np.eye(n)) <= 1e-12
    ok = euler and table and abel and bool(core)
    assert record(8, "structural suite", ok,
                  f"Euler 2-2g for g=1..5: {euler}; label table: {table}; abelianized cocycle "
                  f"zero: {abel}; Riesz/log/polar invariants: {bool(core)}")


if __name__ == "__main__":
    import sys
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
