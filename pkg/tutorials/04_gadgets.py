"""
Gadgets
=======

Gadgets are small picky-pattern graphs glued onto operand vertices.
Each one is checked by enumerating every operand vector and completion.
"""

from pgg import GameInstance, attach_gadget, build_gadget, decide_pne, picky, verify_contract

near_or = build_gadget("near-or", 1, 3)
print(near_or.size, "vertices, membrane", [near_or.labels[v - 1] for v in near_or.membrane])
rep = verify_contract(near_or, mode="exact")
print("realized operand vectors", ["".join(map(str, v)) for v in rep.realized])

# EQUIV at k=2 is too big to enumerate whole; compositional mode
# verifies its TRUE/FALSE parts separately and pins their operands
rep = verify_contract(build_gadget("equiv", 2), mode="compositional")
print("equiv k=2", rep.passed, "sub-reports", len(rep.sub_reports))

# FALSE forces its operand inactive in any PNE of the host
host = GameInstance.build(2, [(1, 2)], picky(1))
game, placement = attach_gadget(host, build_gadget("false", 1), [1])
res = decide_pne(game)
print(res.status.value, res.profile[:2])
