"""
From 1-in-3 SAT to picky games
==============================

Each clause becomes a CLAUSE gadget; repeated variables are tied with
EQUIV and empty slots pinned with FALSE.  The game has a PNE exactly
when the formula has a 1-in-3 assignment.
"""

import json

from pgg import (
    OneInThreeInstance, ReductionCertificate, assignment_to_profile, compile_reduction,
    decide_pne, is_pne, profile_to_assignment, satisfying_assignments,
)

inst = OneInThreeInstance(3, ((1, 2, 3), (1, 2, 0)))
print("1-in-3 assignments", satisfying_assignments(inst))

for k in (1, 2):
    game, cert = compile_reduction(inst, k)
    res = decide_pne(game)
    print(f"k={k} n={game.n} {res.status.value}", profile_to_assignment(inst, cert, res.profile, game))

game, cert = compile_reduction(inst, 2)
s = assignment_to_profile(inst, cert, (0, 1, 0), game)
print("witness profile is a PNE:", bool(is_pne(game, s)))

# the certificate rebuilds the exact game from its JSON form
back = ReductionCertificate.from_json(json.loads(cert.dumps()))
assert back.rebuild() == game
