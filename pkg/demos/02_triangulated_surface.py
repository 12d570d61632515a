# A triangulated genus-g surface whose edges carry words in the free group.
from collections import Counter

from quasirep import build_complex, edge_labels, orientation_signs
from quasirep.surface import cocycle_defect_word, edge_incidence, tree_is_spanning

for g in (1, 2, 3):
    c = build_complex(g)
    print(f"genus {g}: V={len(c.vertices)} E={len(c.edges)} F={len(c.triangles)}"
          f"  chi={c.euler_characteristic}")
    print("  every edge on two triangles:", set(edge_incidence(c).values()) == {2})
    print("  spanning tree:", tree_is_spanning(c))

c = build_complex(2)
labels = edge_labels(c)

# labels are short words; most edges carry the empty word
print(Counter(str(labels[e]) for e in c.edges).most_common(8))

# labels compose around a triangle except in one place
for t, tri in enumerate(c.triangles):
    w = cocycle_defect_word(labels, tri)
    if len(w):
        print("triangle", t, c.triangle_lifts[t], "defect word:", w)
print("exceptional triangle:", c.exceptional_triangle)

# orientation signs from the planar picture of each wedge
signs = orientation_signs(c)
print("sign of exceptional triangle:", signs[c.exceptional_triangle])
print("signed count:", sum((-1) ** s for s in signs))
