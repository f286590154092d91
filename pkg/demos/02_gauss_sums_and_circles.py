# # Gauss sums and the Fourier transform of circles
#
# The quadratic Gauss sum G1 = sum eta(t) chi(t) has a sign that depends on
# p mod 4 and on the degree of the extension.  Its square is eta(-1) q, and
# this number is exactly what shows up when one writes down the transform
# of a circle in closed form.

import numpy as np

from ffext import field_of_order, gauss_sum, gauss_sum_closed_form
from ffext.distance_lab import circle_family, sphere_ft_explicit_all, weil_constant

# ## Direct sums against the closed form

print(f"{'q':>4} {'p%4':>4} {'k':>2}  {'direct':>22}  {'closed':>22}  |G1^2 - eta(-1)q|")
for q in (3, 5, 7, 9, 11, 13, 25, 27, 49, 81, 121):
    F = field_of_order(q)
    g, c = gauss_sum(F), gauss_sum_closed_form(F)
    eta_m1 = F.eta(F.neg(1))
    print(f"{q:>4} {F.p % 4:>4} {F.k:>2}  {g:>22.6f}  {c:>22.6f}  {abs(g * g - eta_m1 * q):.1e}")

# ## Circle sizes
#
# For t != 0 every circle x1^2 + x2^2 = t has q - eta(-1) points.  The
# radius-zero circle is a pair of lines when -1 is a square and a single
# point otherwise.

for q in (13, 27):
    fam = circle_family(field_of_order(q))
    print(f"q={q}: |V_0|={fam.sizes[0]}, |V_t| for t != 0 in {set(fam.sizes[1:].tolist())},",
          f"Weil constant {weil_constant(fam):.3f}")

# ## Closed form against the direct transform

for q in (5, 7, 9, 11, 13):
    fam = circle_family(field_of_order(q))
    err = np.abs(sphere_ft_explicit_all(fam) - fam.ft_cache).max()
    print(f"q={q:>2}: max error over all radii and frequencies {err:.2e}")

# ## The transform only sees the norm of m
#
# V_t^(m) depends on m through ||m|| alone, so each (t, ||m||) cell of the
# table below is one complex number.

fam = circle_family(field_of_order(7))
table = np.zeros((7, 7), dtype=complex)
for k in range(7):
    m = np.argwhere(fam.values == k)[0]
    table[:, k] = fam.ft_cache[:, m[0], m[1]] * 7**2
np.set_printoptions(precision=2, suppress=True, linewidth=120)
print("q^2 V_t^(m), rows t, columns ||m||:")
print(table.real)
