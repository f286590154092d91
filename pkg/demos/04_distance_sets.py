# # Distances between two point sets in F_q^2
#
# For E, F in the plane, Delta(E, F) collects the values (x1-y1)^2 + (x2-y2)^2.
# Once |E||F| passes q^(8/3), random sets see essentially every distance.
# This script walks through the counting function behind that statement and
# then runs the experiment itself.

import numpy as np

from ffext.distance_lab import (PointSetPair, circle_family, counting_function,
                                counting_function_fourier, falconer_experiment,
                                second_moment_decomposition, summarize, uniform_random)
from ffext.finite_field import field_of_order

F = field_of_order(13)
fam = circle_family(F)
rng = np.random.default_rng(1)
pair = PointSetPair(uniform_random(F, 40, rng), uniform_random(F, 40, rng))

# ## Counting pairs at each distance, two ways

nu = counting_function(pair, fam)
via_fourier = counting_function_fourier(pair, fam)
print("nu:", nu.values.tolist())
print("sum nu = |E||F|:", nu.total(), "=", len(pair.E) * len(pair.F))
print("Fourier path max error:", np.abs(via_fourier - nu.values).max())

# ## The second moment, piece by piece
#
# sum_t nu(t)^2 splits into a main term from |V_t|^2, a cross term, and a
# term quadratic in the Fourier data.  Each piece below is exact.

sm = second_moment_decomposition(pair, fam)
print(f"direct {sm.direct}, I {sm.I:.2f}, II {sm.II.real:.2f}, III {sm.III.real:.2f}")
print(f"III_1 {sm.III_1.real:.2f}, III_2 {sm.III_2.real:.2f}, I+II+III {sm.reconstructed.real:.4f}")

# ## The experiment
#
# Sizes are the smallest n with n^2 >= q^(8/3), then the same harness at
# |E| = |F| = q for comparison.

for q in (25, 27, 49):
    n = next(k for k in range(1, q * q) if k**6 >= q**8)
    above = summarize(falconer_experiment(q, n, n, trials=30))
    below = summarize(falconer_experiment(q, q, q, trials=30))
    print(f"q={q} n={n}: {above}  |  n=q: {below}")

# ## Structured sets
#
# Translates of F_5 x F_5 inside F_25^2 only produce distances in F_5, so
# they stay far from covering F_25 even at moderate size.

rows = falconer_experiment(25, 50, 50, trials=10, generators=("uniform", "subfield", "line", "circles"))
for key, stats in summarize(rows).items():
    print(f"{key:<18} min {stats['min']:.2f}  mean {stats['mean']:.2f}")
