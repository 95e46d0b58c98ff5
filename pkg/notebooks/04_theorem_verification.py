"""Checking the Sobolev-type inequalities on analytic test functions."""
from dimsob.harness import ExperimentConfig, index_threshold, laursa_chain_check, verify
from dimsob.rearrange import StepProfile
from dimsob.rispace import Lp


def show(rep):
    print(f"{rep.name:10s} lhs {rep.lhs:.6f}  rhs {rep.rhs:.6f}  passed {rep.passed}  vacuous {rep.metadata['vacuous']}")
    for item in rep.metadata["items"]:
        print("    ", item["label"], item.get("note", ""))


# Tail-difference and oscillation forms on a ball with a linear radial profile.
for theorem in ("main1", "main2", "teo01"):
    show(verify(ExperimentConfig(theorem, Lp(2), "ball", 3, "radial:linear")))

# On L^1 the operator P is unbounded, so the oscillation form is vacuous,
# while Q stays bounded (norm 1) and the tail-difference form is informative.
show(verify(ExperimentConfig("main2", Lp(1), "rn", 3)))
show(verify(ExperimentConfig("main1", Lp(1), "rn", 3)))

# The sphere statement and the inclusion into the small Lebesgue space.
show(verify(ExperimentConfig("esfera", Lp(2), "sphere", 4, "cap:cosine")))
show(verify(ExperimentConfig("inclusion", Lp(2), "rn", 5, "radial:quadratic")))

# Higher-order statement: needs n at least the index threshold.
print("threshold for L^2:", index_threshold(Lp(2)))
show(verify(ExperimentConfig("ordenk", Lp(2), "rn", 6, "radial:square", k=2)))

# Minkowski chain: equality on L^1, strict on L^2.
lin = StepProfile.from_function(lambda s: 1 - s, [i / 500 for i in range(1, 501)])
for p in (1, 2):
    rep = laursa_chain_check(lin, Lp(p))
    print(f"chain L^{p}: {rep.lhs:.10f} <= {rep.rhs:.10f}")
