"""
Stage 3: picking a winner with a Scheffe tournament
===================================================

Each pair of candidates is compared on the set where one density exceeds the
other. The candidate whose probability of that set is closest to the empirical
frequency wins the contest; the most wins takes the tournament.
"""
import numpy as np

from simplexlearn import CandidateFamily, Simplex, scheffe_tournament, tv_uniform
from simplexlearn.sampling import sample_uniform_simplex
from simplexlearn.select import min_samples_selection

truth = Simplex([[0.0], [1.0]])
rng = np.random.default_rng(3)
members = [truth] + [Simplex(np.sort(rng.uniform(-1, 2, 2))[:, None]) for _ in range(9)]
family = CandidateFamily.from_simplices(members)

n = min_samples_selection(len(family), 0.1, 0.1)
x = sample_uniform_simplex(truth, n, rng)
report = scheffe_tournament(family, x)

print("samples used:", n)
print("wins:", report.wins)
print("winner", report.winner, "TV to truth", tv_uniform(family.simplex(report.winner), truth).value)
print("guarantee:", report.guarantee)
