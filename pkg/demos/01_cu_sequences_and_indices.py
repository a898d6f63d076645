"""Completely unadmissible sequences and the ordinal bookkeeping they index.

A CU sequence (j_1, ..., j_k) satisfies j_s >= 2*j_{s+1} + 1.  These
sequences label the cells of every chart in this package; their total
order (longer first, then right-lexicographic) is exactly the order of
the filtration indices the three chart families use.
"""

from tsseq import (
    binom_mod2,
    cu_compare,
    cu_concat,
    cu_excess,
    cu_is_valid,
    mu_tahss,
    mu_tehpss,
    mu_tgss,
)

print("mod-2 binomials are defined for every pair of integers:")
for a, b in [(4, 0), (5, 2), (-1, 7), (13, 4)]:
    print(f"  binom({a},{b}) = {binom_mod2(a, b)}")

print("\nvalidity and derived quantities:")
for seq in [(9, 4), (4, 3), (7, 3, 1), ()]:
    print(f"  {seq}: valid={cu_is_valid(seq)} degree={sum(seq)} excess={cu_excess(seq)}")

print("\nthe total order puts longer sequences first:")
pairs = [((7, 3, 1), (7, 3)), ((4, 1), (8, 2)), ((9, 4), (11, 4))]
for a, b in pairs:
    rel = {-1: "<", 0: "=", 1: ">"}[cu_compare(a, b)]
    print(f"  {a} {rel} {b}")

print("\njoining sequences checks the junction inequality:")
print("  [ (9), (4) ] ->", cu_concat((9,), (4,)))

print("\neach chart family embeds cells into its ordinal index group:")
print("  layer chart index of (9,4):   ", mu_tahss((9, 4)))
print("  sphere chart index of (9,4):  ", mu_tgss((9, 4)))
print("  EHP chart index of ((9,), 2): ", mu_tehpss((9,), 2))
print("  sphere order agrees with the sequence order:",
      mu_tgss((15, 3)) < mu_tgss((4,)))
