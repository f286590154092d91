# # Fourier analysis on the plane over a finite field
#
# Functions on F_q^2 come in two flavours here.  On the "physical" side we
# average (each point has mass q^-2); on the frequency side we simply add.
# With that convention the forward transform, its inverse and Plancherel
# all line up without stray factors of q.

import numpy as np

from ffext import field_of_order
from ffext.plane_fourier import (FREQUENCY_SPACE, constant, convolve, forward_ft, indicator,
                                 inverse_ft, norm_lp, point_mass, random_function)

# ## A field with nine elements
#
# F_9 is built as F_3[x]/(x^2 + 1).  Elements are stored as integers
# c0 + 3 c1, so 5 stands for 2 + x.

F9 = field_of_order(9)
print("modulus:", F9.modulus_text())
theta = F9([0, 1])
print("theta^2 =", theta * theta, " trace(theta) =", theta.trace())

# ## Transforms of simple functions
#
# The constant function transforms to a spike at the origin, and a spike
# at the origin transforms to the constant q^-2.

one_hat = forward_ft(constant(F9))
print("1^ at 0:", one_hat(0, 0).real, " elsewhere max:", np.abs(one_hat.values[1:]).max())
delta_hat = forward_ft(point_mass(F9, (0, 0)))
print("delta^ values:", np.unique(np.round(delta_hat.values.real, 12)))

# ## Round trip, Plancherel, convolution

rng = np.random.default_rng(0)
f = random_function(F9, rng)
h = random_function(F9, rng)
fh, hh = forward_ft(f), forward_ft(h)
print("round trip error  :", np.abs(inverse_ft(fh).values - f.values).max())
print("Plancherel        :", norm_lp(fh, 2), "vs", norm_lp(f, 2))
conv_err = np.abs(forward_ft(convolve(f, h)).values - fh.values * hh.values).max()
print("convolution error :", conv_err)

# ## Mixing up the two spaces is an error

try:
    inverse_ft(f)
except Exception as exc:
    print("refused:", type(exc).__name__)

# ## Sums of two points on a circle
#
# Convolving the indicator of the unit circle with itself counts, for
# every y, the pairs of circle points adding up to y.  The origin gets one
# pair per point (x and -x); everywhere else there are at most two.

F13 = field_of_order(13)
pts = np.array([(a, b) for a in range(13) for b in range(13)
                if F13.add(F13.mul(a, a), F13.mul(b, b)) == 1])
circ = indicator(F13, pts)
pair_counts = np.rint(convolve(circ, circ).values.real * 13**2).astype(int)
print("|V| =", len(pts), " pairs at 0:", pair_counts[0, 0], " max elsewhere:", np.delete(pair_counts.ravel(), 0).max())
print("frequency-side indicator norm:", norm_lp(indicator(F13, [(1, 1)], FREQUENCY_SPACE), 3))
