"""Composing operators adds reciprocal scales.

Prints exact images of a few test functions and shows that applying
S_m after S_n is the same operator as a single S_h with 1/h = 1/m + 1/n.
"""

from fractions import Fraction

from durrmeyer_lab import OperatorParams, apply_operator_exact, monomial
from durrmeyer_lab.functions import EXPQ


def S(n, j, f):
    return apply_operator_exact(OperatorParams(n, j), f)


def main():
    print("images of e_2 for several shifts, n = 4")
    for j in (-2, 0, 1, 3):
        print(f"  j={j:2d}: {S(4, j, monomial(2))}")

    m, n, j = 6, 3, 1
    h = Fraction(m * n, m + n)
    for label, f in (("e_3", monomial(3)), ("e^(t/4)", EXPQ)):
        twice = S(m, j, S(n, j, f))
        once = S(h, j, f)
        print(f"\n{label}: S_{m}(S_{n} f) - S_{h} f = {twice - once}")
        print(f"  S_{h} f = {once}")

    # l-fold iterate collapses to scale m/l
    g = monomial(1)
    for _ in range(3):
        g = S(6, 0, g)
    print(f"\nS_6 applied three times to e_1: {g}  (S_2 e_1 = {S(2, 0, monomial(1))})")


if __name__ == "__main__":
    main()
