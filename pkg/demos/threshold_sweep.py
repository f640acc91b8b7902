"""
Where superbroadcasting starts
==============================

Sweep the input photon number for a few (N, M) pairs and print where the
output noise drops below the input noise. The CSV written here is the same
one the ``cvbroadcast sweep`` command produces.
"""

# %%
import numpy as np

from cvbroadcast import bounds, cli
from cvbroadcast.circuits import run_broadcast

for n, m in [(2, 3), (2, 10), (3, 4), (4, 100)]:
    grid = np.linspace(0, 1.2, 121)
    flags = [run_broadcast(n, m, x).superbroadcast for x in grid]
    first = grid[flags.index(True)] if any(flags) else None
    print(f"N={n} M={m:<4} threshold {bounds.superbroadcast_threshold(n, m):.4f}  first grid point above {first}")

# %%
# CSV through the command-line layer
# ----------------------------------
cli.main(["sweep", "--n", "2", "--m-list", "3,4,5", "--nbar-list", "0,0.5,1", "--format", "csv"])
