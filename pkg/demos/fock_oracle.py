"""
Brute-force check in a truncated Fock space
===========================================

The Gaussian results are reproduced with dense density matrices. The
amplifier is a two-mode squeezer acting on a vacuum ancilla. Truncation
leaves a small trace deficit which is reported rather than normalized away.
"""

# %%
from cvbroadcast.circuits import run_broadcast
from cvbroadcast.fock import oracle_broadcast, oracle_purify

r = oracle_broadcast(2, 3, 0.5, 0.2, cutoff=10)
g = run_broadcast(2, 3, 0.5, 0.2)
print(f"Fock nbar_out {r.nbar_out:.6f}  Gaussian {g.output_nbar:.6f}")
print(f"min fidelity {r.min_fidelity:.6f}  trace deficit {r.trace_deficit:.1e}")

# %%
# Convergence in the cutoff
# -------------------------
for d in (8, 10, 12, 14):
    print(d, f"{oracle_broadcast(1, 2, 0.0, 0.4, cutoff=d).nbar_out:.6f}")

print("purify 2 -> 1:", round(oracle_purify(2, 1, 1.0, 0.3, cutoff=14).nbar_out, 6))
