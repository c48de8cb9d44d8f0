"""Growth law of the square spectrum: how slowly the asymptotics arrive.

For the unit square the counting asymptotics give lambda_k ~ 4 pi k, but
the Dirichlet boundary correction decays only like 1/sqrt(k).  Fitting
log lambda against log k over increasing windows shows the fitted constant
and exponent creeping toward their limits -- a concrete caution against
reading asymptotic constants off small spectra.
"""

import numpy as np

from spectralab import Spectrum, weyl_fit
from spectralab.reference import rectangle_spectrum

spec = Spectrum(rectangle_spectrum(50000), 2, "closed_form")
target = 4 * np.pi

print(f"target: constant {target:.4f}, exponent 1\n")
print(f"{'fit window':>16s} {'constant':>9s} {'dev':>7s} {'exponent':>9s} "
      f"{'mean/k':>8s} {'mean dev':>8s}")
for hi in (500, 2000, 10000, 50000):
    lo = max(1, hi // 4)
    fit = weyl_fit(spec, 2, 1.0, (lo, hi))
    mean_dev = abs(fit.mean_form - fit.mean_form_target) / fit.mean_form_target
    print(f"[{lo:>6d},{hi:>6d}] {fit.constant:>9.4f} "
          f"{abs(fit.constant - target) / target:>7.1%} {fit.exponent:>9.4f} "
          f"{fit.mean_form:>8.4f} {mean_dev:>8.1%}")

print("\nthe 1/sqrt(k) boundary term explains the slow approach:")
for k in (500, 5000, 50000):
    lam_k = spec.values[k - 1]
    print(f"  k={k:>6d}: lambda_k/(4 pi k) = {lam_k / (target * k):.4f} "
          f"(1 + 1.128/sqrt(k) = {1 + 2 / np.sqrt(np.pi * k):.4f})")
