"""
Patterns and pure equilibria
============================

A vertex reads its pattern at its weighted active degree and wants to
play that bit.  A profile where every vertex does so is a PNE.
"""

from pgg import GameInstance, classify, enumerate_pne, is_pne, parse_pattern

# 10* means "act only if no neighbour acts"
p = parse_pattern("10*")
print(p, [p.eval(i) for i in range(5)])

# on a path the PNE of 10* are the maximal independent sets
path = GameInstance.build(4, [(1, 2), (2, 3), (3, 4)], "10*")
for s in enumerate_pne(path):
    print("".join(map(str, s)))

# is_pne explains which vertices are unhappy
report = is_pne(path, (1, 1, 0, 0))
print(bool(report), report.violators)

# patterns outside the decreasing family can rule equilibria out
pennies = GameInstance.build(2, [(1, 2)], ["10*", "0(1)*"])
print("pennies has a PNE:", bool(enumerate_pne(pennies)))

for text in ["110*", "(10)*", "10010*", "1010*"]:
    print(text, sorted({c.verdict for c in classify(parse_pattern(text))}))
