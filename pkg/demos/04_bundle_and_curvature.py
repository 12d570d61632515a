# The glued projection over the surface and its connection along dual cells.
import numpy as np

from quasirep import clock_shift_tuple, identity_tuple
from quasirep.ktheory import (
    boundary_integral_check,
    connection_integral,
    e_pi_local,
    idempotency_residual,
    pushforward_local,
    surface_data,
)

c, labels = surface_data(1)
tri = c.exceptional_triangle
bc = np.full(3, 1 / 3)

# the glued projection is an exact idempotent everywhere, by construction
for t in (identity_tuple(1, 4), clock_shift_tuple(8, 1)):
    e = e_pi_local(c, labels, t, tri, bc)
    print(t.family, "||e^2 - e|| =", f"{idempotency_residual(e):.1e}")

# pushing forward the raw labels is only approximately idempotent;
# the error shrinks with the commutator defect
for n in (4, 8, 16, 32, 64):
    t = clock_shift_tuple(n, 1)
    r = idempotency_residual(pushforward_local(c, labels, t, tri, bc))
    print(f"n={n:3d}  residual {r:.4f}")

# integrating the connection form along the interpolating edge
t = clock_shift_tuple(8, 1)
val = connection_integral(c, labels, t, tri)
print("integral / 2 pi i =", np.round(val / (2j * np.pi), 12))
print("max mismatch over all triangles:",
      max(boundary_integral_check(c, labels, t, k) for k in range(len(c.triangles))))
