"""Bessel-type eigenfunctions: S_{n,j} g = e^{p/n} g and D_j^2 g = p g."""

import numpy as np

from durrmeyer_lab import OperatorParams, apply
from durrmeyer_lab.spectral import (
    EigenParams,
    diffop_eigen_residual,
    eigenfunction,
    eigenfunction_closed_form,
    eigenfunction_spec,
)

xs = np.array([0.5, 1.0, 2.0, 4.0])

print(" j     p   n   max|S g / g - e^(p/n)|   max|D g - p g|   series vs Bessel")
for j in (-2, 0, 2):
    for p in (-1.0, 2.0):
        ep = EigenParams(j, p)
        g = eigenfunction(ep, xs)
        closed = eigenfunction_closed_form(ep, xs)
        for n in (4, 8):
            image = apply(OperatorParams(n, j), eigenfunction_spec(ep), xs).value
            drift = np.max(np.abs(image / g - np.exp(p / n)))
            d2 = np.max(diffop_eigen_residual(ep, xs))
            rel = np.max(np.abs(g - closed) / np.abs(closed))
            print(f"{j:2d} {p:5.1f} {n:3d}   {drift:22.3e}   {d2:14.3e}   {rel:16.3e}")
