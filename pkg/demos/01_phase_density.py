"""How a second specular ray reshapes the received phase.

With one ray plus diffuse scattering (Rician) the phase piles up around the
ray's own phase.  Adding a second ray of comparable strength spreads it out,
and when the two rays are equal and dominate, the density splits into two
peaks on either side of zero.
"""

import numpy as np

from twdp_phase import PhasePdfSpec, from_normalized
from twdp_phase.phase_pdf import count_local_maxima, default_grid

phi = default_grid(2001)

print("K    Gamma  p(0)    p(pi/2)  modes")
for k in (1, 5, 10, 15):
    for gamma in (0.0, 0.3, 0.7, 1.0):
        spec = PhasePdfSpec.build(from_normalized(k, gamma, 1.0))
        dens = spec(phi)
        print(f"{k:<4} {gamma:<6} {spec(0.0):.4f}  {spec(np.pi / 2):.4f}   {count_local_maxima(dens)}")

# where do the two peaks sit for equal rays?
spec = PhasePdfSpec.build(from_normalized(15, 1.0, 1.0))
dens = spec(phi)
print("\nequal rays, K=15: peak at phi =", f"{abs(phi[np.argmax(dens)]):.3f} rad (and its mirror image)")
