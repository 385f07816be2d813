"""
Left-invariant geometry of Nil, SL2 and Sol
===========================================

Each group comes with an orthonormal frame of left-invariant fields.  The
structure constants of that frame determine everything else: the
Levi-Civita connection, the curvature tensor and the sectional curvature of
any tangent plane.  All of it is computed in exact rational arithmetic.
"""

# %%
# Connection tables.  ``covariant(i, j)`` gives the components of
# nabla_{e_i} e_j (0-based indices here).
from spinorsurf import NIL, SL2, SOL, connection_from_structure, curvature_tensor
from spinorsurf.lie import tangent_plane_curvature

for g in (NIL, SL2, SOL):
    conn = connection_from_structure(g)
    print(f"\n{g.name.value}")
    for i in range(3):
        for j in range(3):
            comps = conn.covariant(i, j)
            if any(comps):
                terms = " + ".join(f"({c}) e{k + 1}" for k, c in enumerate(comps) if c)
                print(f"  nabla_e{i + 1} e{j + 1} = {terms}")

# %%
# Sectional curvatures of the coordinate planes.  Components with three
# distinct indices vanish for all three groups.
for g in (NIL, SL2, SOL):
    curv = curvature_tensor(g, connection_from_structure(g))
    row = ", ".join(f"R{i}{j}{i}{j} = {curv.component(i, j, i, j)}" for i, j in ((1, 2), (1, 3), (2, 3)))
    print(f"{g.name.value:4s} {row}")

# %%
# For Nil the curvature of a tangent plane depends only on the angle between
# its normal and e3: K = 1/4 - n3^2.
import numpy as np

curv = curvature_tensor(NIL, connection_from_structure(NIL))
for phi in np.linspace(0, np.pi / 2, 5):
    n = np.array([np.sin(phi), 0.0, np.cos(phi)])
    print(f"phi = {phi:5.3f}  K = {tangent_plane_curvature(curv, n):+.6f}  "
          f"1/4 - cos^2 = {0.25 - np.cos(phi) ** 2:+.6f}")

# %%
# The matrix charts.  In Nil the product of (x1, y1, z1) and (x2, y2, z2) is
# (x1 + x2, y1 + y2, z1 + z2 + x1 y2).
from spinorsurf.lie import group_mul, nil_element

p = group_mul(nil_element(1.0, 2.0, 0.5), nil_element(-0.5, 3.0, 1.0))
print("Nil product:", p.coords)
