"""The two rewriting systems and the dual Steenrod action.

Words of lowering operations rewrite to the admissible basis; words of
the bar operations rewrite to the completely unadmissible basis.  The
dual Steenrod action is computed by the Nishida rule followed by
rewriting, and is the engine's source of attaching-map differentials.
"""

from tsseq import adem_rewrite, bar_rewrite, nishida_action, transfer_length2

print("admissible-basis rewriting (entries r > 2s rewrite):")
for word in [(2, 2), (5, 2), (3, 1)]:
    print(f"  Q{word} ->", sorted(adem_rewrite([word])) or "0")

print("\nCU-basis rewriting at weight 1:")
for word in [(9, 4), (5, 4), (7, 4)]:
    print(f"  Qb{word} ->", sorted(bar_rewrite([word], 1)) or "0")

print("\nthe four worked dual-Steenrod identities:")
print("  Sq^2 on (4,)   ->", sorted(nishida_action(2, [(4,)], 1)))
print("  Sq^2 Sq^1 (6,) ->",
      sorted(nishida_action(2, list(nishida_action(1, [(6,)], 1)), 1)))
print("  Sq^4 on (9,4)  ->", sorted(nishida_action(4, [(9, 4)], 1)))
print("  Sq^2 on (9,2)  ->", sorted(nishida_action(2, [(9, 2)], 1)))

print("\nthe length-two transfer lands on completely unadmissible pairs:")
for r, s in [(3, 2), (4, 2)]:
    print(f"  Tr Q^{r} Q^{s} ->", sorted(transfer_length2(r, s)))
