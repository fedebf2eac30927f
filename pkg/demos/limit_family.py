"""The dyadic limit family: one law per position gamma in [1, 2], closed circle.

Centered St. Petersburg sums S_n/n - log2(n) do not converge: they chase a
moving target G_gamma indexed by the dyadic position gamma_n = n/2^floor(log2 n).
The family is closed under doubling (gamma = 1 and gamma = 2 are the same
law), which this script verifies at the characteristic-function level, and
its CDFs come out of Gil-Pelaez inversion.
"""

import numpy as np

from semistable import (cdf_from_cf, convolution_power, g_exponent,
                        g_gamma_exponent, g_gamma_law, gamma_n, petersburg_law)

print("== dyadic position of n ==")
for n in (1024, 1100, 1536, 2047, 2048):
    print("  n=%5d  gamma_n = %.6f" % (n, gamma_n(n)))

print()
print("== the family closes: gamma = 2 equals gamma = 1 ==")
ts = np.linspace(-40, 40, 801)
ts = ts[ts != 0]
err = np.max(np.abs(g_gamma_exponent(ts, 2.0) - g_exponent(ts)))
print("  max |h_2(t) - h_1(t)| on [-40, 40]: %.3e" % err)

print()
print("== convolution powers move along the family ==")
law = petersburg_law()
half = convolution_power(law, 0.5)
restored = convolution_power(half, 2.0)
err = np.max(np.abs(restored(ts) - law(ts)))
print("  (phi^(1/2))^2 recovers phi to %.3e" % err)

print()
print("== CDF tables for three family members ==")
xs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0])
rows = {g: cdf_from_cf(g_gamma_law(g), xs, 1e-8) for g in (1.0, 1.25, 1.5)}
print("      x:" + "".join("%9.1f" % x for x in xs))
for g, f in rows.items():
    print("  g=%.2f:" % g + "".join("%9.5f" % v for v in f))
print("the members are distinct laws; sums visit each octave position in turn.")
