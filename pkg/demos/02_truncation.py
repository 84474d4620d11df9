"""How many mixture terms does the density need, and what do they buy?

The density is a Poisson-weighted mixture over m.  The default summation range
comes from a normal (Wald) interval around nu.  This script prints the range,
the Poisson mass it keeps, and how far the truncated density is from the one
summed to convergence.  For small nu the normal interval is noticeably
narrower than its nominal level, which is why ``tail_bounds`` exists.
"""

import math

import numpy as np
from scipy.stats import poisson

from twdp_phase import PhasePdfSpec, from_normalized
from twdp_phase.phase_pdf import default_grid, power_share_pdf, tail_bounds, truncation_bounds

phi = default_grid(361)
print("nu      range     terms  kept Poisson  kept power  max|p - p_full|")
for k, gamma in ((2, 1.0), (8, 1.0), (20, 1.0), (60, 1.0)):
    p = from_normalized(k, gamma, 1.0)
    b = truncation_bounds(p.nu, 99.9)
    kept = poisson.cdf(b.m_max, p.nu) - poisson.cdf(b.m_min - 1, p.nu)
    share = power_share_pdf(p.nu, b.indices()).sum()
    full = PhasePdfSpec.build(p, bounds=tail_bounds(p.nu, 1e-16))(phi)
    trunc = PhasePdfSpec.build(p, 99.9)(phi)
    print(f"{p.nu:<7.3g} [{b.m_min:>2},{b.m_max:>3}]  {b.n_terms:>4}   {kept:.5f}      {share:.5f}     "
          f"{np.max(np.abs(full - trunc)):.1e}")

b = tail_bounds(30.0, 1e-12)
print(f"\nfor a hard 1e-12 tail at nu=30 use tail_bounds: [{b.m_min}, {b.m_max}], {b.n_terms} terms")
