"""Reference Calibration
=======================

The published BBO pump parameters do not say how a coherence length becomes a
bandwidth, nor which index branch each wave sees. This example runs the sweep
that settles both and prints the comparison table.
"""

from biphoton_design import load_material
from biphoton_design.calibration import calibrate


# %%
# Sweep Conventions and Optic Axes
# --------------------------------

result = calibrate(load_material("BBO"), branch_space="optic-axis")
print(result.candidate.label, "score =", result.score, "accepted =", result.accepted)


# %%
# Computed Versus Published
# -------------------------

result.display_frame()
