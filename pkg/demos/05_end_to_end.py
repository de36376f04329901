"""
The full learner, and what the theory asks for
==============================================

``learn`` runs all three stages on a noisy dataset. The sample-size
calculators show how far the desk-scale run is from the worst-case bounds.
"""
import warnings

from simplexlearn import ExperimentConfig, generate_dataset, learn, standard_simplex
from simplexlearn.bounding import HeuristicBallWarning
from simplexlearn.metrics import complexity_report

warnings.simplefilter("ignore", HeuristicBallWarning)
truth = standard_simplex(1)
data = generate_dataset(truth, 5000, sigma=1 / 50, seed=0)

result = learn(data, ExperimentConfig(snr=50.0, eps_rep=0.2, seed=0))
print("learned vertices:", result.learned.vertices.ravel())
print("family size:", result.family_size, " TV to truth:", round(result.tv_to_truth, 4))
print("noise-gap bound:", result.guarantee.eps1)
print("stage timings (s):", {k: round(v, 2) for k, v in result.timings.items()})

for formula, kw in [("thm1", dict(M=result.family_size, eps=0.2, delta=0.1)),
                    ("thm2", dict(dim=1, theta_upper=1.0, ratio=result.ball.radius, eps=0.2, delta=0.1)),
                    ("thm3", dict(dim=1, theta_lower=1.0, theta_upper=1.0, snr=50.0, eps=0.2, delta=0.1))]:
    print(formula, "needs n =", complexity_report(formula, **kw)["n"])
