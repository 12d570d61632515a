"""K-theoretic invariants of a unitary tuple.

Three routes to the same number:

* the Bott-type projection ``e(u, v)`` and its integer ``kappa`` (genus one),
* the signed sum of path determinants over the triangulated surface,
* bundle-side checks on the projection ``e_pi`` glued from transition
  functions, including a quadrature of the connection form along the dual
  cell boundaries.
"""
import functools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .determinant import TWO_PI_I, MatrixPath, dhs_linear, dhs_quadrature, winding_invariant
from .errors import (
    NotUnitary,
    QuasiRepError,
    SegmentNotInvertible,
    VerificationFailed,
)
from .groups import commutator_defect, evaluate_word, make_rng
from .matcore import (
    as_matrix,
    functional_calculus_normal,
    is_unitary,
    operator_norm,
    riesz_half_plane,
)
from .surface import (
    COLLAR,
    build_complex,
    collar_parameter,
    edge_labels,
    orientation_signs,
    partition_of_unity_at,
    signed_area,
    transition_at,
)

# Peak of the tent ``f``.  Off-centre so that the spectral gap of e(u, v)
# stays open for clock/shift pairs up to p/n = 1/4.
PEAK = 0.3
KAPPA_GAP = 1e-6


# ---------------------------------------------------------------------------
# Bott projection

def _circle_parameter(z):
    t = np.mod(np.angle(z) / (2 * np.pi), 1.0)
    return np.where(np.minimum(t, 1.0 - t) < 1e-14, 0.0, t)


def chord_functions(t, peak=PEAK):
    """``(f, g, h)`` on ``[0, 1)`` with ``g h = 0`` and ``g^2 + h^2 = f - f^2``."""
    t = np.asarray(t, dtype=float)
    f = np.where(t <= peak, t / peak, (1.0 - t) / (1.0 - peak))
    root = np.sqrt(np.clip(f - f * f, 0.0, None))
    g = np.where(t <= peak, root, 0.0)
    h = np.where(t > peak, root, 0.0)
    return f, g, h


@dataclass(frozen=True)
class BottProjectionData:
    u: np.ndarray
    v: np.ndarray
    matrix: np.ndarray
    idempotency_residual: float


def bott_projection(u, v, peak=PEAK):
    """``[[f(v), g(v) + h(v) u*], [g(v) + u h(v), 1 - f(v)]]``."""
    u, v = as_matrix(u), as_matrix(v)
    if u.shape != v.shape:
        raise ValueError("u and v differ in size")
    for name, m in (("u", u), ("v", v)):
        if not is_unitary(m):
            raise NotUnitary(f"{name} is not unitary within 1e-12")
    n = u.shape[0]

    def calc(k):
        return functional_calculus_normal(v, lambda z: chord_functions(_circle_parameter(z), peak)[k])

    f, g, h = calc(0), calc(1), calc(2)
    # the spectral calculus of a unitary is Hermitian only up to rounding
    f, g, h = [0.5 * (x + x.conj().T) for x in (f, g, h)]
    e = np.block([[f, g + h @ u.conj().T], [g + u @ h, np.eye(n) - f]])
    res = operator_norm(e @ e - e)
    return BottProjectionData(u, v, e, res)


class KappaValue(NamedTuple):
    value: float
    integer: int

    @property
    def residual(self):
        return abs(self.value - self.integer)


def kappa_invariant(u, v, threshold=KAPPA_GAP):
    """Rank of the spectral projection of ``e(u, v)`` minus ``n``."""
    e = bott_projection(u, v).matrix
    n = e.shape[0] // 2
    rp = riesz_half_plane(e, threshold)
    value = rp.trace - n
    return KappaValue(float(value), int(round(value)))


# ---------------------------------------------------------------------------
# simplicial determinant sum

def _triangle_matrices(c, labels, t, cache):
    out = []
    for tri in c.triangles:
        i, j, k = tri
        mats = []
        for e in ((i, j), (j, k), (i, k)):
            if e not in cache:
                cache[e] = evaluate_word(t, labels[e])
            mats.append(cache[e])
        out.append(tuple(mats))
    return out


def simplex_terms(c, labels, t):
    """Complex path functional of ``xi_sigma`` for every triangle, in order."""
    terms = []
    for sid, (sij, sjk, sik) in enumerate(_triangle_matrices(c, labels, t, {})):
        try:
            terms.append(dhs_linear(sik, sij @ sjk, full=True))
        except SegmentNotInvertible as exc:
            raise SegmentNotInvertible(str(exc), simplex=sid) from None
    return terms


def simplicial_pushforward(c, labels, t):
    """Signed sum of the per-simplex path functionals.

    ``S = -sum_sigma (-1)^{s(sigma)} D(xi_sigma)``; the overall sign comes
    from ``ch = tau(i Omega / 2 pi)`` while the boundary integrals compute
    ``tau(Omega)``.  Returns ``(S, terms)`` with the real parts of the terms.
    """
    terms = [z.real for z in simplex_terms(c, labels, t)]
    signs = orientation_signs(c)
    total = 0.0
    for s, d in zip(signs, terms):
        total -= (-1) ** s * d
    return float(total), terms


# ---------------------------------------------------------------------------
# the glued projection e_pi and the push-forward pi(e)

def _local_transitions(c, labels, t, triangle, point):
    par = collar_parameter(point)
    v = {}
    for a, b in ((0, 1), (1, 2), (0, 2)):
        m = transition_at(c, labels, t, triangle, (a, b), par)
        v[(a, b)] = m
        v[(b, a)] = np.linalg.inv(m)
    return v


def _assemble(weights, block, n):
    out = np.zeros((3 * n, 3 * n), dtype=complex)
    r = np.sqrt(weights)
    for a in range(3):
        for b in range(3):
            if r[a] > 0 and r[b] > 0:
                out[a * n:(a + 1) * n, b * n:(b + 1) * n] = r[a] * r[b] * block(a, b)
    return out


def e_pi_local(c, labels, t, triangle, point):
    """The 3x3 block grid of ``e_pi`` over the vertices of ``triangle``."""
    point = np.asarray(point, dtype=float)
    chi = partition_of_unity_at(c, triangle, point)
    v = _local_transitions(c, labels, t, triangle, point)
    eye = np.eye(t.dim, dtype=complex)
    return _assemble(chi, lambda a, b: eye if a == b else v[(a, b)], t.dim)


def _embed(c, triangle, local, n):
    size = len(c.vertices) * n
    out = np.zeros((size, size), dtype=complex)
    ids = c.triangles[triangle]
    for a in range(3):
        for b in range(3):
            ra, rb = ids[a] * n, ids[b] * n
            out[ra:ra + n, rb:rb + n] = local[a * n:(a + 1) * n, b * n:(b + 1) * n]
    return out


def e_pi_at(c, labels, t, triangle, point):
    """``e_pi`` at a barycentric point, as an (N dim) x (N dim) matrix."""
    return _embed(c, triangle, e_pi_local(c, labels, t, triangle, point), t.dim)


def pushforward_local(c, labels, t, triangle, point):
    """Block grid of ``pi(e)``: the same weights but the raw images ``pi(s_ij)``."""
    chi = partition_of_unity_at(c, triangle, np.asarray(point, dtype=float))
    i, j, k = c.triangles[triangle]
    ids = (i, j, k)
    n = t.dim
    eye = np.eye(n, dtype=complex)

    def block(a, b):
        if a == b:
            return eye
        if a < b:
            return evaluate_word(t, labels[(ids[a], ids[b])])
        return evaluate_word(t, labels[(ids[b], ids[a])]).conj().T

    return _assemble(chi, block, n)


def pushforward_at(c, labels, t, triangle, point):
    return _embed(c, triangle, pushforward_local(c, labels, t, triangle, point), t.dim)


def idempotency_residual(m):
    return operator_norm(m @ m - m)


def sample_points(c, count, seed):
    """``count`` (triangle, barycentric point) pairs, reproducible from ``seed``."""
    rng = make_rng(seed)
    tris = rng.integers(0, len(c.triangles), size=count)
    pts = rng.dirichlet(np.ones(3), size=count)
    return [(int(a), p) for a, p in zip(tris, pts)]


def max_residual(c, labels, t, samples, kind="bundle"):
    local = e_pi_local if kind == "bundle" else pushforward_local
    return max((idempotency_residual(local(c, labels, t, tri, p)) for tri, p in samples),
               default=0.0)


def bundle_rank_check(c, labels, t, samples=20, seed=0, kind="bundle"):
    """Max ``|rank chi(e(x)) - dim|`` over random points.

    ``samples`` may be a count or an explicit list of (triangle, point).
    ``kind`` selects ``e_pi`` ("bundle") or ``pi(e)`` ("pushforward").
    """
    pts = sample_points(c, samples, seed) if isinstance(samples, int) else list(samples)
    local = e_pi_local if kind == "bundle" else pushforward_local
    worst = 0.0
    for tri, p in pts:
        m = local(c, labels, t, tri, p)
        res = idempotency_residual(m)
        if res >= 0.25:
            raise QuasiRepError(f"idempotency residual {res:.3e} >= 1/4 at triangle {tri}")
        rp = riesz_half_plane(m)
        worst = max(worst, abs(rp.trace - t.dim))
    return worst


# ---------------------------------------------------------------------------
# boundary integral of the connection form

def _block_boundary_runs_inward(coords):
    """True if the boundary of the dual block of local vertex 0 runs from the
    midpoint of the long edge towards the barycenter."""
    x0, x1, x2 = np.asarray(coords, dtype=float)
    m01, m02 = 0.5 * (x0 + x1), 0.5 * (x0 + x2)
    bc = (x0 + x1 + x2) / 3.0
    # polygon x0 -> m01 -> bc -> m02 traverses bc -> m02 (outward)
    a = signed_area([x0, m01, bc]) + signed_area([x0, bc, m02])
    return a < 0


def connection_integral(c, labels, t, triangle, tolerance=1e-10):
    """``integral tau(v_ki^-1 d v_ki)`` along the boundary piece between the
    dual blocks of the first and last vertex, oriented as the boundary of the
    block of the first vertex."""
    sij, sjk, sik = (evaluate_word(t, labels[e]) for e in (
        (c.triangles[triangle][0], c.triangles[triangle][1]),
        (c.triangles[triangle][1], c.triangles[triangle][2]),
        (c.triangles[triangle][0], c.triangles[triangle][2])))
    target = sij @ sjk
    slope = target - sik
    knee = 3.0 * COLLAR  # parameter where the collar begins

    def v_ik(s):
        # point (1/2 - s/6, s/3, 1/2 - s/6): midpoint at s = 0, barycenter at s = 1
        par = collar_parameter((0.5 - s / 6.0, s / 3.0, 0.5 - s / 6.0))
        return (1.0 - par) * sik + par * target

    def value(s):
        return np.linalg.inv(v_ik(s))

    def derivative(s):
        d = slope / knee if s < knee else np.zeros_like(slope)
        w = value(s)
        return -w @ d @ w

    path = MatrixPath.smooth(value, derivative, breakpoints=(0.0, knee, 1.0))
    inward = dhs_quadrature(path, tolerance, full=True)[0] * TWO_PI_I
    runs_inward = _block_boundary_runs_inward(c.triangle_coords[triangle])
    return inward if runs_inward else -inward


def boundary_integral_check(c, labels, t, triangle, tolerance=1e-10):
    """``|integral / ((-1)^s 2 pi i) - D(xi_sigma)|`` for one triangle."""
    s = orientation_signs(c)[triangle]
    integral = connection_integral(c, labels, t, triangle, tolerance)
    i, j, k = c.triangles[triangle]
    sij = evaluate_word(t, labels[(i, j)])
    sjk = evaluate_word(t, labels[(j, k)])
    sik = evaluate_word(t, labels[(i, k)])
    closed = dhs_linear(sik, sij @ sjk, full=True)
    return abs(integral / ((-1) ** s * TWO_PI_I) - closed)


# ---------------------------------------------------------------------------
# full verification

@functools.lru_cache(maxsize=None)
def surface_data(genus):
    """Triangulation and labels, built once per genus."""
    c = build_complex(genus)
    return c, edge_labels(c)


@dataclass(frozen=True)
class VerifyOptions:
    tol_sw: float = 1e-8
    tol_kw: float = 1e-6
    tol_quant: float = 1e-8
    quadrature_tol: float = 1e-10
    bundle_samples: int = 20
    seed: int = 0
    boundary_check: bool = True


@dataclass(frozen=True)
class Verdict:
    passed: bool
    value: float
    tolerance: float


@dataclass
class InvariantReport:
    genus: int
    dim: int
    family: str
    defect: float
    winding: float
    simplicial: float
    kappa: float = None
    kappa_int: int = None
    kappa_gap: float = None
    terms: list = field(default_factory=list)
    exceptional_simplex: int = None
    exceptional_term: float = None
    max_other_term: float = None
    bundle_residual: float = None
    pushforward_residual: float = None
    rank_deviation: float = None
    boundary_residual: float = None
    verdicts: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(v.passed for v in self.verdicts.values())

    def to_dict(self):
        d = {k: getattr(self, k) for k in (
            "genus", "dim", "family", "defect", "winding", "simplicial", "kappa",
            "kappa_int", "kappa_gap", "exceptional_simplex", "exceptional_term",
            "max_other_term", "bundle_residual", "pushforward_residual",
            "rank_deviation", "boundary_residual")}
        d["terms"] = list(self.terms)
        d["verdicts"] = {k: {"passed": v.passed, "value": v.value, "tolerance": v.tolerance}
                         for k, v in self.verdicts.items()}
        d["passed"] = self.passed
        return d


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except QuasiRepError as exc:
        raise VerificationFailed(name, exc) from exc
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        raise VerificationFailed(name, exc) from exc


def verify(t, options=None):
    """Compute every invariant of ``t`` and compare them."""
    opt = options or VerifyOptions()
    c, labels = surface_data(t.genus)
    defect = commutator_defect(t)
    w = _stage("winding", winding_invariant, t)
    s, terms = _stage("simplicial", simplicial_pushforward, c, labels, t)
    exc = c.exceptional_triangle
    others = [abs(x) for i, x in enumerate(terms) if i != exc]

    rep = InvariantReport(
        genus=t.genus, dim=t.dim, family=t.family, defect=defect,
        winding=w, simplicial=s, terms=terms, exceptional_simplex=exc,
        exceptional_term=terms[exc], max_other_term=max(others, default=0.0),
    )

    samples = sample_points(c, opt.bundle_samples, opt.seed)
    rep.bundle_residual = max_residual(c, labels, t, samples, "bundle")
    rep.pushforward_residual = max_residual(c, labels, t, samples, "pushforward")
    if rep.bundle_residual < 0.25:
        rep.rank_deviation = _stage("bundle", bundle_rank_check, c, labels, t, samples)
    if opt.boundary_check:
        rep.boundary_residual = max(
            _stage("boundary", boundary_integral_check, c, labels, t, k, opt.quadrature_tol)
            for k in range(len(c.triangles)))

    rep.verdicts["S_equals_W"] = Verdict(abs(s - w) <= opt.tol_sw, abs(s - w), opt.tol_sw)
    q = t.dim * w
    rep.verdicts["quantization"] = Verdict(abs(q - round(q)) <= opt.tol_quant,
                                           abs(q - round(q)), opt.tol_quant)
    if t.genus == 1:
        bp = _stage("kappa", bott_projection, t.u(1), t.v(1))
        k = _stage("kappa", kappa_invariant, t.u(1), t.v(1))
        rep.kappa, rep.kappa_int = k.value, k.integer
        rep.kappa_gap = float(np.min(np.abs(np.linalg.eigvals(bp.matrix).real - 0.5)))
        diff = abs(k.value - q)
        rep.verdicts["kappa_equals_dimW"] = Verdict(
            diff <= opt.tol_kw and k.integer == round(q), diff, opt.tol_kw)
    return rep
