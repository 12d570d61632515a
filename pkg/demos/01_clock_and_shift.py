# Clock and shift matrices: the smallest almost-commuting pair with a twist.
import numpy as np

from quasirep import clock_shift_tuple, commutator_defect, kappa_invariant, winding_invariant
from quasirep.ktheory import bott_projection

n, p = 5, 1
t = clock_shift_tuple(n, p)
u, v = t.u(1), t.v(1)

# v u = e^{2 pi i p/n} u v, so the group commutator is a scalar
comm = u @ v @ u.conj().T @ v.conj().T
print("commutator is scalar:", np.allclose(comm, comm[0, 0] * np.eye(n)))
print("scalar =", np.round(comm[0, 0], 12), " defect =", round(commutator_defect(t), 6))

# winding invariant: normalized trace of the log of the commutator, over 2 pi i
print("W =", winding_invariant(t), " (expected", -p / n, ")")

# Bott projection of the pair: almost an idempotent, with a spectral gap at 1/2
bp = bott_projection(u, v)
ev = np.sort(np.linalg.eigvals(bp.matrix).real)
print("||e^2 - e|| =", round(bp.idempotency_residual, 4))
print("eigenvalues of e:", np.round(ev, 3))

# counting eigenvalues right of 1/2 gives an integer
k = kappa_invariant(u, v)
print("kappa =", k.integer, " dim * W =", n * winding_invariant(t))

# the same holds across the table of small phases
for n in range(3, 13):
    for p in range(1, n // 4 + 1):
        t = clock_shift_tuple(n, p)
        k = kappa_invariant(t.u(1), t.v(1)).integer
        print(f"n={n:2d} p={p}  W={winding_invariant(t):+.4f}  kappa={k:+d}")
