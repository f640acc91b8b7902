"""
Superbroadcasting two noisy coherent signals into three
=======================================================

Two copies of a displaced thermal state are merged into one mode, amplified
and split into three outputs. Above a small amount of input noise each output
is *less* noisy than the inputs.
"""

# %%
# Run the circuit
# ---------------
from cvbroadcast import bounds
from cvbroadcast.circuits import build_broadcast_circuit, run_broadcast

for stage in build_broadcast_circuit(2, 3).stages:
    print(stage)

report = run_broadcast(2, 3, nbar_in=1.0, alpha=0.3)
print(f"input nbar  {report.nbar_in:.6f}")
print(f"output nbar {report.output_nbar:.6f}")
print(f"bound       {report.bound - 0.5:.6f}")
print(f"amplitude   {report.per_copy_amplitude[0]:.6f}")

# %%
# Shared noise
# ------------
# The three outputs are correlated. Every off-diagonal entry of the number
# correlation matrix equals the diagonal one, so Cauchy-Schwarz is tight.
print(report.correlations.real.round(6))
check = bounds.check_cauchy_schwarz(report.correlations, [report.output_nbar] * 3, report.per_copy_amplitude)
print("tight everywhere:", check.all_tight)

# %%
# Adding copies
# -------------
# More outputs cost more noise, approaching the phase-conjugation value.
for m in (3, 4, 6, 10, 100):
    print(m, round(run_broadcast(2, m, 1.0).gamma_out, 6))
print("phase conjugation limit", bounds.phase_conj_bound(1.5, 2))
