"""
Purifying noisy copies
======================

Merging N copies into one mode and splitting the result back out with vacua
reduces the thermal photon number by a factor N. How many purified copies
are kept does not matter.
"""

# %%
from cvbroadcast.circuits import run_purify

for m in range(1, 5):
    r = run_purify(4, m, nbar_in=1.0, alpha=0.5j)
    print(f"4 -> {m}: nbar_out {r.output_nbar:.12f}  amplitude {r.per_copy_amplitude[0]:.3f}")

# %%
# The purified copies are still correlated with each other.
print(run_purify(4, 3, 1.0).correlations.real.round(6))
