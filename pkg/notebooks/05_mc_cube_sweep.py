"""Monte Carlo rearrangements on the cube and a dimension sweep."""
import numpy as np

from dimsob.harness import ExperimentConfig, TensorCube, dimension_sweep, mc_rearrangement
from dimsob.isoprofile import geometry_constant
from dimsob.rispace import Lp

# f(x) = x_1 is uniform on [0, 1] whatever n is, so f*(s) = 1 - s.  The
# empirical rearrangement lies within the DKW half-width.
prof, band = mc_rearrangement(TensorCube("identity", 12), 10 ** 5, seed=0)
s = np.linspace(0.01, 0.99, 99)
print("max |f* - (1 - s)| =", np.max(np.abs(prof(s) - (1 - s))), " band", band)

# max(x_1, x_2) has f*(s) = sqrt(1 - s).
prof, band = mc_rearrangement(TensorCube("identity", 2, "max"), 10 ** 5, seed=0)
print("max |f* - sqrt(1 - s)| =", np.max(np.abs(prof(s) - np.sqrt(1 - s))))

# The ratio of the oscillation functional to the L^2 norm of the gradient
# stays put as n grows, far below the dimension-free constant.
configs = [ExperimentConfig("main2", Lp(2), "cube", n, "tensor:identity", seed=1, samples=2 * 10 ** 5)
           for n in range(2, 21, 3)]
print("n   ratio     bound")
for row in dimension_sweep(configs):
    print(f"{row.n:<3d} {row.ratio:.5f}  {geometry_constant('rn', 1):.5f}")
