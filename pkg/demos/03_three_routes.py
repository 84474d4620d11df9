"""Three independent ways to the same number.

* the Poisson mixture of per-term closed expressions (the production path),
* the closed form built from Humbert Phi_3 and a triple series,
* direct quadrature over the exact Rician envelope (no expansion at all).

The closed form is only practical for moderate K: its triple series
alternates, and the printed cancellation factor shows how many digits it eats.
"""

import numpy as np

from twdp_phase import PhasePdfSpec, from_normalized, phase_pdf_closed, phase_pdf_oracle
from twdp_phase.phase_pdf import tail_bounds
from twdp_phase.specfun import triple_f3_instance

for k, gamma in ((1, 0.5), (3, 1.0), (10, 0.5)):
    p = from_normalized(k, gamma, 1.0)
    spec = PhasePdfSpec.build(p, bounds=tail_bounds(p.nu, 1e-17))
    print(f"K={k}, Gamma={gamma}")
    for phi in (0.0, 0.8, 2.5):
        mix, closed, quad = spec(phi), phase_pdf_closed(p, phi).total, phase_pdf_oracle(p, phi)
        print(f"  phi={phi:<4} mixture {mix:.14f}  closed {closed:.14f}  quadrature {quad:.14f}")
    ac2 = p.a
    _, cancel = triple_f3_instance(-ac2 * p.nu, ac2, p.a * p.nu, return_cancellation=True)
    print(f"  triple-series cancellation factor at phi=0: {cancel:.2g}")
