"""Cell bases of the stable layers and the maps between them.

Each layer L(k)_n has one cell per CU sequence of length k and excess
at least n.  The lower map appends the weight, the suspension kills the
minimal-excess cells, and together they partition each degree.
"""

from tsseq import basis, e_star, p_star, steenrod_on_cell

print("degree-by-degree bases of L(2)_1:")
for d in range(4, 11):
    cells = sorted(basis(2, 1, d), key=lambda c: tuple(reversed(c)))
    print(f"  degree {d:2d}: {cells}")

print("\nthe partition at degree 7 (lower image + suspension survivors):")
n = 1
whole = basis(2, n, 7)
pushed = {p_star(J, n) for J in basis(1, 2 * n + 1, 7 - n)}
survive = {J for J in whole if e_star(J, n) is not None}
print("  whole:    ", sorted(whole))
print("  pushed:   ", sorted(pushed))
print("  suspended:", sorted(survive))

print("\ndual Steenrod action, cell to cell:")
print("  Sq^4 [9,4] ->", sorted(steenrod_on_cell(4, (9, 4), 1)))
print("  Sq^2 [9,2] ->", sorted(steenrod_on_cell(2, (9, 2), 1)))
