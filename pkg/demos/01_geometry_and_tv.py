"""
Simplices, volumes and total variation
======================================

A K-simplex is stored as a (K+1, K) array of vertices. Volumes come from a
determinant, and the TV distance between two uniform simplices is exact for
K <= 2 (interval overlap, triangle clipping) and Monte Carlo otherwise.
"""
import numpy as np

from simplexlearn import Simplex, standard_simplex, tv_uniform
from simplexlearn.geometry import tight_params

# the standard triangle and a shifted copy
tri = standard_simplex(2)
moved = tri.translated([0.1, 0.05])
print("volume", tri.volume, "diameter", tri.diameter)

# tight isoperimetry constants: the smallest theta_upper and largest theta_lower that hold
print("tight params", tight_params(tri))

# exact TV from polygon clipping, and a Monte Carlo check of the same number
exact = tv_uniform(tri, moved)
mc = tv_uniform(tri, moved, mode="mc", budget=200_000, rng=0)
print(f"TV exact {exact.value:.5f}   MC {mc.value:.5f} +/- {mc.standard_error:.5f}")

# a tetrahedron only has the MC route
tet = Simplex(np.vstack([np.zeros(3), np.eye(3)]))
print("K=3 TV to a scaled copy:", tv_uniform(tet, tet.scaled(1.1), mode="mc", rng=1).value)
