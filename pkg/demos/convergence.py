"""Decay of the truncated 1/n expansion for f(t) = e^{t/4} at x = 1.

The residual after q correction terms should fall like n^-(q+1).
A cubic needs only three terms before the expansion is exact.
"""

from durrmeyer_lab.asymptotics import expansion_term_table, voronovskaja_residual
from durrmeyer_lab.algebra import monomial
from durrmeyer_lab.functions import EXPQ, exppoly_spec

spec = exppoly_spec(EXPQ, "expq")
for q in range(4):
    est = voronovskaja_residual(1, spec, 1.0, q, (16, 32, 64, 128))
    res = "  ".join(f"{r:.3e}" for r in est.residuals)
    print(f"q={q}  residuals {res}  slope {est.slope:.3f}")

print("\ncubic, j = 0, n = 16")
for row in expansion_term_table(0, monomial(3), 1, 3, 16):
    ratio = "-" if row.ratio is None else f"{row.ratio:.4f}"
    print(f"q={row.q}  partial sum {row.partial_sum:.12f}  R={row.residual:.3e}  R(2n)/R(n)={ratio}  exact={row.exact_zero}")
