"""Norms in rearrangement-invariant spaces, Hardy operators and Boyd indices."""
import numpy as np

from dimsob.oracle import riemann_norm_oracle
from dimsob.rearrange import StepProfile
from dimsob.rispace import (
    LogRefined,
    LorentzPQ,
    Lp,
    boyd_indices,
    fundamental_function,
    operator_norm,
    parse_space,
    ri_norm,
    small_lebesgue_norm,
)

prof = StepProfile.canonical([0.1, 0.4, 1.0], [5.0, 2.0, 0.5])

# Closed-form norms against a brute-force Riemann sum.
for space in (Lp(1), Lp(2), LorentzPQ(2, 1), LogRefined(Lp(2), 1, "ln"), parse_space("orlicz:xlog")):
    fast = ri_norm(space, prof)
    slow = riemann_norm_oracle(space, prof, 10 ** 5)
    print(f"{space!r:45s} {fast:.10f}  riemann {slow:.10f}")

# The small Lebesgue norm is the first log-refined space over Lp.
print("small Lebesgue, q = 2:", small_lebesgue_norm(2.0, prof))

# Fundamental functions: t^(1/p) for Lp and Lorentz spaces.
t = np.array([0.01, 0.25, 1.0])
print("phi_L2", fundamental_function(Lp(2), t))

# Boyd indices from the dilation function.  Lp has both indices 1/p; the
# numeric estimate samples ln h(r) / ln r and extrapolates.
for p in (1.5, 2.0, 4.0):
    print(p, boyd_indices(Lp(p)), boyd_indices(Lp(p), method="numeric").lower)

# Q_a is bounded on Lp exactly when a < 1/p, with norm 1/(1/p - a).
# The lower value comes from explicit witnesses.
for p, a in ((2.0, 0.0), (2.0, 0.4), (2.0, 0.5), (1.0, 0.0)):
    est = operator_norm(Lp(p), "Q", a)
    print(f"Q_{a} on L^{p}: [{est.lower:.4f}, {est.upper}]")
print("P on L^1:", operator_norm(Lp(1), "P").upper)
