# # How large can the extension operator get?
#
# For a curve V with |V| about q, the ratio
#     ||(f dsigma)^v||_{L^4} / ||f||_{L^2(dsigma)}
# stays bounded in q exactly when V carries no line.  We estimate its
# supremum from below by gradient ascent and from above through the
# additive structure of V.

import numpy as np

from ffext.curves import contains_line, parse_poly, variety_of
from ffext.extension_lab import (autocorrelation_profile, constant_function_ratio, estimate_rstar,
                                 line_test_ratio, necessary_conditions, rstar_upper_bound,
                                 surface_measure)
from ffext.finite_field import field_of_order

# ## Line-free curves

curves = ["x1^2 + x2^2 - 1", "x1^2 - x2", "x1^4 + x2^4 - 1"]
print(f"{'curve':<18}{'q':>5}{'|V|':>6}{'lower':>9}{'const f':>9}{'upper':>9}")
for text in curves:
    for q in (13, 29, 53, 101):
        v = variety_of(parse_poly(text, field_of_order(q)))
        est = estimate_rstar(surface_measure(v), 2, 4, restarts=8)
        print(f"{text:<18}{q:>5}{v.cardinality:>6}{est.ratio:>9.3f}"
              f"{constant_function_ratio(v):>9.3f}{rstar_upper_bound(v):>9.3f}")

# ## A curve made of lines
#
# x1 x2 = 0 is the union of the two axes.  Putting all the mass of f on one
# axis concentrates the extension on the q frequencies orthogonal to it, and
# the ratio grows like q^(1/4).

print(f"\n{'q':>5}{'line ratio':>12}{'q^(1/4)':>10}")
for q in (5, 13, 29, 61, 101):
    poly = parse_poly("x1*x2", field_of_order(q))
    sigma = surface_measure(variety_of(poly))
    print(f"{q:>5}{line_test_ratio(sigma, contains_line(poly)):>12.3f}{q ** 0.25:>10.3f}")

# ## Where the upper bound comes from
#
# The number of ways to write a as x + y with x, y on the circle is |V| at
# a = 0 and at most 2 elsewhere.  The single exceptional point and the small
# regular maximum are all the upper bound needs.

v = variety_of(parse_poly("x1^2 + x2^2 - 1", field_of_order(31)))
prof = autocorrelation_profile(v)
print("\nexceptional points:", prof.exceptional, " max elsewhere:", prof.max_regular)

# ## Exponent bookkeeping

for p, r, s, alpha in [(2, 4, 1, 0), (2, 3.5, 1, 0), (2, 4, 1, 1), (1, np.inf, 1, 1)]:
    print(f"(p, r, s, alpha) = ({p}, {r}, {s}, {alpha}):", bool(necessary_conditions(p, r, s, alpha)))
