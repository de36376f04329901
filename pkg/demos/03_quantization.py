"""
Stage 2: a finite family of candidate simplices
===============================================

The ball is covered by a grid (or a random point set) at spacing tied to the
target accuracy; every (K+1)-subset of covering points is a candidate. Any
simplex in the ball has a candidate close to it in TV.
"""
import numpy as np

from simplexlearn import BoundingBall, QuantizationParams, grid_covering, standard_simplex, tv_uniform
from simplexlearn.quantize import enumerate_candidates, random_covering, snap_to_covering, verify_cover

truth = standard_simplex(1)
q = QuantizationParams(eps_rep=0.3, vol_root=1.0, theta_upper=1.0, dim=1)
print("alpha", q.alpha, "covering resolution", q.eps_cov)

ball = BoundingBall(np.array([0.5]), 0.75)
grid = grid_covering(ball, q.eps_cov)
print("grid points:", len(grid))
print("random covering:", len(random_covering(ball, 0.2, 0)), "points at resolution 0.2")
print("probe check:", verify_cover(grid, 1000, 0).to_dict())

family = enumerate_candidates(grid, 1)
best = min(tv_uniform(family.simplex(i), truth).value for i in range(len(family)))
print(f"{len(family)} candidates, closest to the truth at TV {best:.4f} (target 0.3)")

# snapping each vertex to its nearest covering point gives one good candidate directly
idx, tv = snap_to_covering(grid, truth)
print("snapped vertices", grid.points[idx].ravel(), "TV", round(tv, 4))
