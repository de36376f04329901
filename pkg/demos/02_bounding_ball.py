"""
Stage 1: a ball that contains the simplex
=========================================

From noisy samples we estimate the centroid and a radius that covers every
vertex with probability 1 - delta. The radius grows when the SNR drops toward
the critical value where the bound stops being defined.
"""
import warnings

from simplexlearn import IsoperimetryParams, NoiseModel, bounding_ball, generate_dataset, standard_simplex
from simplexlearn.bounding import HeuristicBallWarning, critical_snr, min_samples_lemma1

truth = standard_simplex(2)
params = IsoperimetryParams(1.5, 2.5)
vol_root = truth.volume ** 0.5

print("pairs needed for the high-probability statement:", min_samples_lemma1(2, 1.5, 0.1))
print("critical SNR:", critical_snr(2, 1.5))

# with far fewer samples the ball is still computed, but flagged as heuristic
warnings.simplefilter("ignore", HeuristicBallWarning)
for snr in (5, 20, 100):
    data = generate_dataset(truth, 20_000, vol_root / snr, seed=snr)
    ball = bounding_ball(data, params, NoiseModel.oracle(vol_root / snr, vol_root), delta=0.1)
    covered = ball.contains(truth.vertices).all()
    print(f"SNR {snr:>3}: radius {ball.radius:6.3f}  all vertices inside: {covered}")
