# Winding number, simplicial determinant sum and Bott index side by side.
from quasirep import (
    clock_shift_tuple,
    perturbed_commuting_tuple,
    twisted_genus_tuple,
    verify,
)

tuples = [clock_shift_tuple(8, 1), clock_shift_tuple(12, 3),
          twisted_genus_tuple(2, 8, 1), twisted_genus_tuple(3, 8, 3),
          perturbed_commuting_tuple(1, 10, 0.05, 7), perturbed_commuting_tuple(2, 6, 0.1, 1)]

print(f"{'family':38s} {'defect':>8s} {'W':>9s} {'S':>9s} {'kappa':>6s}  pass")
for t in tuples:
    r = verify(t)
    kap = "" if r.kappa_int is None else f"{r.kappa_int:+d}"
    print(f"{r.family:38s} {r.defect:8.4f} {r.winding:+9.5f} {r.simplicial:+9.5f} {kap:>6s}  {r.passed}")

# the whole signed sum sits on a single triangle
r = verify(twisted_genus_tuple(3, 8, 1))
print("terms above 1e-12:", [(i, round(x, 6)) for i, x in enumerate(r.terms) if abs(x) > 1e-12])
