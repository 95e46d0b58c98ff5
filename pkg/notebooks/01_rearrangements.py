"""Decreasing rearrangements, maximal averages and the oscillation f** - f*.

Run with ``python notebooks/01_rearrangements.py``.
"""
import numpy as np

from dimsob.oracle import GridFunction1D, check_oscillation, check_polya_szego, exact_rearrangement_pl
from dimsob.rearrange import StepProfile, WeightedSample, decreasing_rearrangement, maximal_average, median_value

# A sample with weights: the rearrangement sorts values downward and stacks
# their measures from 0.
sample = WeightedSample(np.array([0.3, 2.0, 1.0, 2.0]), np.array([0.1, 0.2, 0.3, 0.4]))
f_star = decreasing_rearrangement(sample)
print("breaks", f_star.breaks, "values", f_star.values)

# Equal values merge, so 2.0 occupies [0, 0.6).  The maximal average is
# the running mean of f*, and it dominates f*.
t = np.array([0.1, 0.5, 0.6, 0.8, 1.0])
print("f*(t) ", f_star(t))
print("f**(t)", maximal_average(f_star, t))
print("median", median_value(f_star))

# A step approximation of f*(s) = 1 - s.  Its oscillation f** - f* is s / 2.
lin = StepProfile.from_function(lambda s: 1.0 - s, np.linspace(0, 1, 1001)[1:])
s = np.array([0.2, 0.5, 0.9])
print("oscillation of 1 - s at", s, "=", maximal_average(lin, s) - lin(s))

# Continuous piecewise linear functions on [0, 1] have piecewise linear
# rearrangements.  The brute-force checks compare both sides of the
# one-dimensional oscillation and Polya-Szego inequalities.
f = GridFunction1D((2 * np.linspace(0, 1, 201) - 1) ** 2)
pl = exact_rearrangement_pl(f)
print("(2x - 1)^2 rearranged at 0.5:", pl(np.array([0.5])))
for rep in (check_oscillation(f), check_polya_szego(f)):
    print(f"{rep.name}: lhs {rep.lhs:.6f} rhs {rep.rhs:.6f} passed {rep.passed}")
