"""
Phase-conjugated copies by measure and prepare
==============================================

Heterodyne detection of the merged input followed by preparing coherent
states at the conjugate amplitude. The noise cost is independent of how many
copies are prepared.
"""

# %%
from cvbroadcast import bounds
from cvbroadcast.circuits import run_phase_conjugate
from cvbroadcast.fock import oracle_phase_conjugate

alpha = 0.3 + 0.4j
for m in (1, 2, 3, 10):
    r = run_phase_conjugate(2, m, 1.0, alpha)
    print(f"M={m:<3} gamma_out {r.gamma_out:.6f}  amplitude {r.per_copy_amplitude[0]:.3f}")
print("bound", bounds.phase_conj_bound(1.5, 2))

# %%
# Monte Carlo check
# -----------------
# Outcomes sampled from the Husimi function of the truncated Fock state.
r = oracle_phase_conjugate(2, 1, 1.0, alpha, samples=100_000, seed=1)
print(f"sampled gamma_out {r.gamma_out:.4f}  amplitude {r.copies[0].amplitude:.3f}")
