"""Q values over histories equal Q values on the product with the progressed formula.

Small random games are solved twice by finite-horizon value iteration: once
with the whole label history as state, once with (state, progressed formula).
"""
from ltlcraft.transform import format_game, random_game, verify_transformation

game = random_game(seed=0)
print(format_game(game))

for seed in range(10):
    rep = verify_transformation(random_game(seed))
    print(f"game {seed}: {rep.n_histories:5d} histories, max |dQ| {rep.max_abs_diff:.1e}, "
          f"argmax agreement {rep.argmax_agreement:.0%}")
