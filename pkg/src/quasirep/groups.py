"""Free-group words, the surface-group presentation and unitary tuples.

Letters are triples ``(k, kind, exp)`` with ``k`` in ``1..g``, ``kind`` in
``{"a", "b"}`` (for the generators lifting alpha_k and beta_k) and ``exp``
in ``{+1, -1}``.  The commutator convention is ``[x, y] = x y x^-1 y^-1``.
"""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DimensionTooSmall, GenusMismatch, NotUnitary
from .matcore import as_matrix, operator_norm, polar_unitary


def _check_letter(letter, genus):
    k, kind, e = letter
    if not (1 <= k <= genus) or kind not in ("a", "b") or e not in (1, -1):
        raise ValueError(f"bad letter {letter!r} for genus {genus}")


@dataclass(frozen=True)
class FreeWord:
    genus: int
    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(tuple(l) for l in self.letters))
        for l in self.letters:
            _check_letter(l, self.genus)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other):
        if self.genus != other.genus:
            raise GenusMismatch(f"genus {self.genus} vs {other.genus}")
        return reduce_word(FreeWord(self.genus, self.letters + other.letters))

    def __pow__(self, n):
        w = identity_word(self.genus)
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            w = w * base
        return w

    def inverse(self):
        return FreeWord(self.genus, tuple((k, t, -e) for k, t, e in reversed(self.letters)))

    def is_reduced(self):
        return all(not _cancels(x, y) for x, y in zip(self.letters, self.letters[1:]))

    def abelianization(self):
        """Exponent sums as a vector in Z^{2g}, ordered a1, b1, ..., ag, bg."""
        v = np.zeros(2 * self.genus, dtype=int)
        for k, t, e in self.letters:
            v[2 * (k - 1) + (t == "b")] += e
        return v

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join((t if e > 0 else t.upper()) + str(k) for k, t, e in self.letters)


def parse_word(text, genus):
    """Inverse of ``str(word)``: ``"a1 b1 A1 B1"``; ``"1"`` is the identity."""
    text = text.strip()
    if text in ("", "1"):
        return FreeWord(genus)
    letters = []
    for tok in text.split():
        kind = tok[0]
        letters.append((int(tok[1:]), kind.lower(), 1 if kind.islower() else -1))
    return FreeWord(genus, letters)


def _cancels(x, y):
    return x[0] == y[0] and x[1] == y[1] and x[2] == -y[2]


def reduce_word(w):
    out = []
    for l in w.letters:
        if out and _cancels(out[-1], l):
            out.pop()
        else:
            out.append(l)
    return FreeWord(w.genus, out)


def identity_word(genus):
    return FreeWord(genus)


def alpha(genus, k, e=1):
    return FreeWord(genus, ((k, "a", e),))


def beta(genus, k, e=1):
    return FreeWord(genus, ((k, "b", e),))


def commutator_word(x, y):
    return x * y * x.inverse() * y.inverse()


@dataclass(frozen=True)
class SurfaceGroupData:
    """Presentation data of the genus-g surface group.

    ``kappa_words[k]`` is the product of the first ``k`` commutators.
    ``families[k]`` holds the natural words of the six elements attached to
    the k-th handle, in the order
    ``(a_k^-1, b_k^-1, K_{k-1}, K_{k-1} a_k, K_{k-1} a_k b_k, K_{k-1} a_k b_k a_k^-1)``.
    ``label_alphabet`` lists the images under the section of every element
    of these families and of their inverses.
    """
    genus: int
    kappa_words: tuple
    families: dict
    label_alphabet: tuple
    _section: dict = field(repr=False, compare=False)

    @property
    def relator(self):
        return self.kappa_words[-1]

    def section_image(self, word):
        """Image under the section of the group element named by ``word``.

        ``word`` must be a natural word of an alphabet element, optionally
        preceded by a full copy of the relator (which is trivial in the
        surface group).  Anything else raises ``KeyError``.
        """
        w = reduce_word(word)
        rel = self.relator.letters
        n = len(rel)
        for r in (rel, self.relator.inverse().letters):
            if w.letters[:n] == r:
                w = FreeWord(self.genus, w.letters[n:])
                break
        return self._section[w.letters]

    def in_alphabet(self, word):
        return reduce_word(word) in self.label_alphabet


def build_surface_group(g):
    if g < 1:
        raise ValueError("genus must be >= 1")
    kappas = [identity_word(g)]
    for k in range(1, g + 1):
        kappas.append(kappas[-1] * commutator_word(alpha(g, k), beta(g, k)))
    families = {}
    section = {}
    for k in range(1, g + 1):
        a, b, kp = alpha(g, k), beta(g, k), kappas[k - 1]
        fam = (a.inverse(), b.inverse(), kp, kp * a, kp * a * b, kp * a * b * a.inverse())
        families[k] = fam
        for nat in fam:
            img = nat
            if k == g and nat == fam[5]:
                # K_{g-1} a_g b_g a_g^-1 equals b_g in the surface group
                img = b
            section[nat.letters] = img
            section[nat.inverse().letters] = img.inverse()
    # b_g appears both as a generator and as the exceptional family element
    section[beta(g, g).letters] = beta(g, g)
    section[beta(g, g, -1).letters] = beta(g, g, -1)
    for k in range(1, g + 1):
        for w in (alpha(g, k), beta(g, k)):
            section.setdefault(w.letters, w)
            section.setdefault(w.inverse().letters, w.inverse())
    alphabet = []
    for img in section.values():
        if img not in alphabet:
            alphabet.append(img)
    return SurfaceGroupData(g, tuple(kappas), families, tuple(alphabet), section)


# ---------------------------------------------------------------------------
# unitary tuples

@dataclass(frozen=True)
class UnitaryTuple:
    """``(u_1, v_1, ..., u_g, v_g)``; ``family`` is a free-form descriptor."""
    genus: int
    unitaries: tuple
    family: str = "custom"

    def __post_init__(self):
        mats = tuple(as_matrix(m) for m in self.unitaries)
        if len(mats) != 2 * self.genus:
            raise GenusMismatch(f"need {2 * self.genus} unitaries, got {len(mats)}")
        n = mats[0].shape[0]
        for i, m in enumerate(mats):
            if m.shape != (n, n):
                raise ValueError("all unitaries must have the same size")
            err = operator_norm(m.conj().T @ m - np.eye(n))
            if err > 1e-12:
                raise NotUnitary(f"entry {i} has ||u*u - 1|| = {err:.3e}")
            m.setflags(write=False)
        object.__setattr__(self, "unitaries", mats)

    @property
    def dim(self):
        return self.unitaries[0].shape[0]

    def u(self, k):
        return self.unitaries[2 * (k - 1)]

    def v(self, k):
        return self.unitaries[2 * (k - 1) + 1]

    def conjugated(self, w):
        """Replace every entry ``x`` by ``w x w*``."""
        w = as_matrix(w)
        return UnitaryTuple(self.genus, tuple(w @ x @ w.conj().T for x in self.unitaries),
                            self.family + "/conjugated")


def _generator_matrix(t, letter):
    k, kind, e = letter
    m = t.u(k) if kind == "a" else t.v(k)
    return m if e > 0 else m.conj().T


def evaluate_word(t, w):
    """Image of ``w`` under the homomorphism sending a_k to u_k and b_k to v_k."""
    if w.genus != t.genus:
        raise GenusMismatch(f"word genus {w.genus} vs tuple genus {t.genus}")
    out = np.eye(t.dim, dtype=complex)
    for l in w.letters:
        out = out @ _generator_matrix(t, l)
    return out


def commutator_product(t):
    out = np.eye(t.dim, dtype=complex)
    for k in range(1, t.genus + 1):
        u, v = t.u(k), t.v(k)
        out = out @ u @ v @ u.conj().T @ v.conj().T
    return out


def commutator_defect(t):
    return operator_norm(commutator_product(t) - np.eye(t.dim))


def clock_matrix(n, p=1):
    return np.diag(np.exp(2j * np.pi * p * np.arange(n) / n))


def shift_matrix(n):
    # v e_j = e_{j-1}, so that v u = e^{2 pi i p/n} u v
    return np.roll(np.eye(n, dtype=complex), -1, axis=0)


def clock_shift_tuple(n, p):
    """Genus-one clock/shift pair with ``v u = exp(2 pi i p/n) u v``.

    Hence ``[u, v] = exp(-2 pi i p/n) * 1``.
    """
    if n < 2:
        raise DimensionTooSmall(f"clock/shift needs n >= 2, got {n}")
    return UnitaryTuple(1, (clock_matrix(n, p), shift_matrix(n)), f"clock-shift(n={n},p={p})")


def twisted_genus_tuple(g, n, p):
    """Clock/shift in the first handle, identity pairs in the others."""
    if g < 1:
        raise ValueError("genus must be >= 1")
    cs = clock_shift_tuple(n, p)
    eye = np.eye(n, dtype=complex)
    mats = cs.unitaries + (eye, eye) * (g - 1)
    return UnitaryTuple(g, mats, f"twisted(g={g},n={n},p={p})")


def identity_tuple(g, n):
    eye = np.eye(n, dtype=complex)
    return UnitaryTuple(g, (eye,) * (2 * g), f"identity(g={g},n={n})")


def make_rng(seed):
    """Counter-based generator; no global random state is touched."""
    return np.random.Generator(np.random.Philox(seed))


def random_unitary(n, rng):
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def perturbed_commuting_tuple(g, n, magnitude, seed):
    """Commuting diagonal unitaries times ``exp(K)`` with ``||K|| = magnitude``.

    Each ``K`` is skew-Hermitian, so the defect is at most ``4 g magnitude``.
    """
    if not 0.0 <= magnitude <= 0.2:
        raise ValueError("magnitude must lie in [0, 0.2]")
    rng = make_rng(seed)
    mats = []
    for _ in range(2 * g):
        phases = rng.uniform(0.0, 1.0, n)
        d = np.diag(np.exp(2j * np.pi * phases))
        h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = h + h.conj().T
        k = 1j * h * (magnitude / np.linalg.norm(h, 2))
        mats.append(polar_unitary(d @ sla.expm(k)) if magnitude > 0 else d)
    return UnitaryTuple(g, tuple(mats), f"perturbed(g={g},n={n},m={magnitude},seed={seed})")


# ---------------------------------------------------------------------------
# multiplicativity of the section on the label alphabet

def _delete_relator_copies(w, relator):
    """Delete whole cyclic conjugates of ``relator^{+-1}`` until none is left.

    Each deletion removes exactly one factor ``x r x^-1`` from ``w``.
    Returns the residual word and the number of deletions.
    """
    n = len(relator)
    pats = set()
    for r in (relator, relator.inverse()):
        for i in range(n):
            pats.add(r.letters[i:] + r.letters[:i])
    count = 0
    while True:
        letters = w.letters
        for i in range(len(letters) - n + 1):
            if letters[i:i + n] in pats:
                w = reduce_word(FreeWord(w.genus, letters[:i] + letters[i + n:]))
                count += 1
                break
        else:
            return w, count


@dataclass(frozen=True)
class MultiplicativityTable:
    constant: int
    pairs: tuple  # (gamma, gamma', delta, count) with section words


def multiplicativity_constant(sg):
    """Number of relator conjugates needed to express s(x)s(y)s(xy)^-1.

    Runs over pairs ``x, y`` of alphabet elements whose product is again
    recognized as an alphabet element ``xy`` by deleting relator copies.
    The constant is an upper bound, not claimed minimal.
    """
    rel = sg.relator
    alph = sg.label_alphabet
    found = []
    for x, y in itertools.product(alph, repeat=2):
        xy = x * y
        best = None
        for d in alph:
            w = xy * d.inverse()
            if np.any(w.abelianization()):
                continue
            rest, c = _delete_relator_copies(w, rel)
            if len(rest) == 0 and (best is None or c < best[1]):
                best = (d, c)
        if best is not None:
            found.append((x, y, best[0], best[1]))
    m = max((c for *_, c in found), default=0)
    return MultiplicativityTable(m, tuple(found))


def quasi_rep_defect_bound(g_or_sg, defect):
    """``M * defect``: bound on ``||pi(x)pi(y) - pi(xy)||`` over the alphabet."""
    sg = g_or_sg if isinstance(g_or_sg, SurfaceGroupData) else build_surface_group(g_or_sg)
    m = multiplicativity_constant(sg).constant
    return m * float(defect), m


def chord(theta):
    """``|e^{2 pi i theta} - 1|``."""
    return 2.0 * abs(math.sin(math.pi * theta))
