"""Transference constants and their behaviour as the dimension grows."""
from math import pi, sqrt

from dimsob.isoprofile import (
    BallEstimator,
    GaussianEstimator,
    PowerRn,
    gaussian_type_check,
    geometry_constant,
    geometry_limit,
    transference_integral,
    LogHalf,
)

# For R^n with unit-volume sets the constant is Gamma(1 + n/2)^(1/n) / sqrt(n).
# It is largest at n = 1 (sqrt(pi)/2) and decreases to 1/sqrt(2e).
for n in (1, 2, 3, 10, 100, 10 ** 4):
    print(f"rn  n={n:6d}  {geometry_constant('rn', n):.8f}")
print("sup =", geometry_limit("rn"), " limit 1/sqrt(2e) =", 1 / sqrt(2 * 2.718281828459045))

# The closed form agrees with direct singular quadrature of the transference integral.
print("quadrature n=5:", transference_integral(PowerRn(5), LogHalf(), 1.0), geometry_constant("rn", 5))

# Ball, sphere and manifold constants tend to finite limits.
for kind, limit in (("ball", pi * sqrt(2) / 2), ("manifold", pi)):
    print(kind, [round(geometry_constant(kind, n), 5) for n in (2, 10, 100, 10 ** 4)], "->", limit)
print("sphere (printed)", geometry_constant("sphere", 10 ** 4, variant="printed"), "->", sqrt(2) * pi)
print("sphere (computed)", geometry_constant("sphere", 10 ** 4), "->", pi / sqrt(2))

# Gaussian-type check: sup over t of (t / J(t)) int_t^1 G.  Finite for
# estimators of Gaussian type.
print("gaussian", gaussian_type_check(GaussianEstimator(1.0), LogHalf()))
print("ball n=8", gaussian_type_check(BallEstimator(8), LogHalf(), r=0.5))
