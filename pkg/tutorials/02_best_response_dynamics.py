"""
Best-response dynamics
======================

With decreasing patterns every flip lowers an integer potential, so the
dynamics stop at a PNE after boundedly many flips.
"""

from fractions import Fraction

from pgg import Gnp, Schedule, generate_instance, potential, run_dynamics, step_bound

g = generate_instance(Gnp(30, Fraction(1, 5)), ["10*", "110*", "1110*"], seed=7)
start = [1] * g.n

for name in ["roundrobin", "first", "random"]:
    trace = run_dynamics(g, start, Schedule.parse(name, seed=3))
    print(f"{name:10s} flips={len(trace.steps):3d} converged={trace.converged}")

trace = run_dynamics(g, start, Schedule.parse("random", seed=3))
print("bound", step_bound(g))
print("potential", trace.potentials[0], "->", trace.potentials[-1])
assert trace.potentials[-1] == potential(g, trace.final)
# replaying the recorded flips lands on the same profile
assert trace.replay() == trace.final
