"""
Solving and exporting
=====================

decide_pne searches with propagation and backjumping.  export_cnf gives a
formula whose models, projected to the vertex variables, are the PNE.
"""

from fractions import Fraction

from pgg import CompleteWeighted, Gnp, decide_pne, enumerate_pne, export_cnf, format_dimacs, \
    generate_instance

g = generate_instance(Gnp(40, Fraction(1, 10)), ["10010*", "1010*"], seed=5)
res = decide_pne(g)
print(res.status.value, "nodes", res.nodes)

# the problem is NP-hard, so large instances may need a node budget
big = generate_instance(Gnp(60, Fraction(1, 10)), ["10010*", "1010*"], seed=5)
print(decide_pne(big, budget=5000).status.value)

small = generate_instance(CompleteWeighted(5, 2), ["110*", "(10)*"], seed=1)
print("PNE", enumerate_pne(small))
f = export_cnf(small)
print("cnf", f.num_vars, "vars", len(f.clauses), "clauses")
print(format_dimacs(f, ["five players"]).splitlines()[0])
