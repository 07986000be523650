"""
Congestion view and threshold games
===================================

Decreasing-pattern games are congestion games in disguise.  Threshold
games map back onto them by choosing k from the threshold.
"""

from fractions import Fraction

from pgg import (
    GameInstance, KRule, ThresholdGame, build_congestion_game, decreasing, enumerate_pne,
    potential, threshold_pne_check, threshold_to_pgg, verify_isomorphism,
)

g = GameInstance.build(3, [(1, 2, 2), (2, 3, 1)], [decreasing(1), decreasing(2), decreasing(3)])
cg = build_congestion_game(g)
s = (1, 0, 1)
print("doubled Rosenthal", cg.doubled_rosenthal(cg.embed(s)), "potential", potential(g, s))
print(verify_isomorphism(g).to_json())

# two players, threshold 3/2, pair cost 1
t = ThresholdGame(2, (Fraction(3, 2), Fraction(3, 2)), {(1, 2): 1})
for rule in KRule:
    pgg, mapping = threshold_to_pgg(t, rule)
    for prof in enumerate_pne(pgg):
        sides = mapping.to_threshold(prof)
        ok = bool(threshold_pne_check(t, sides))
        print(rule.value, [x.value for x in sides], "threshold PNE" if ok else "NOT a threshold PNE")
