"""Phase-synchronization error probability for M-PSK.

The probability that the received phase leaves the correct decision sector.
With one dominant ray it falls off quickly with K; two comparable rays put a
floor under it, and higher-order constellations feel that floor first.
"""

from twdp_phase import McConfig, from_normalized, pe_monte_carlo, pe_mpsk
from twdp_phase.perf import binomial_sigma

print("Gamma  M    K=1       K=5       K=10      K=20")
for gamma in (0.0, 0.4, 1.0):
    for m in (2, 4, 8):
        vals = [pe_mpsk(from_normalized(k, gamma, 1.0), m) for k in (1, 5, 10, 20)]
        print(f"{gamma:<6} {m:<3}" + "".join(f"  {v:.2e}" for v in vals))

p = from_normalized(10, 0.7, 1.0)
quad = pe_mpsk(p, 4)
sim = pe_monte_carlo(McConfig(p, n_samples=2_000_000, seed=1), 4)
print(f"\nK=10, Gamma=0.7, QPSK: quadrature {quad:.5f}, simulation {sim:.5f} "
      f"({(sim - quad) / binomial_sigma(quad, 2_000_000):+.2f} sigma)")
