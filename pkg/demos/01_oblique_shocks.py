# %% [markdown]
# # Oblique shocks on a straight wedge
#
# A Mach 2 stream of air meets a wedge.  For small wedge angles two
# attached shocks turn the flow; beyond the detachment angle none does.

# %%
import math

import numpy as np

from wedgeflow import (AIR, PotentialState, critical_angles, polar_curve, potential_critical_angles,
                       potential_wedge_solutions, state_from_mach, wedge_solutions)

up = state_from_mach(2.0, AIR)
crit = critical_angles(up, AIR)
print(f"detachment angle {math.degrees(crit.theta_d):.3f} deg")
print(f"sonic angle      {math.degrees(crit.theta_s):.3f} deg")

# %% [markdown]
# At 10 degrees the weak shock leaves the flow supersonic and the strong
# one is close to a normal shock.

# %%
pair = wedge_solutions(up, math.radians(10), AIR)
for name, sh in (("weak", pair.weak), ("strong", pair.strong)):
    d = sh.downstream
    print(f"{name:6s} beta = {math.degrees(sh.beta):7.3f} deg  p = {d.p:.4f}  rho = {d.rho:.4f}")

# %% [markdown]
# The polar itself: deflection against shock angle, sampled from the Mach
# wave to the normal shock.  The maximum is the detachment angle.

# %%
curve = polar_curve(up, 200, AIR)
rows = np.array(list(curve.rows()))
k = int(np.argmax(rows[:, 6]))
print(f"max deflection on the sampled polar {math.degrees(rows[k, 6]):.3f} deg "
      f"at beta {math.degrees(rows[k, 0]):.2f} deg")

# %% [markdown]
# The isentropic potential model with the same upstream Mach number turns
# the flow further before detaching, and its weak shock sits slightly flatter.

# %%
pot = PotentialState(2.0, 0.0, 1.0)
pc = potential_critical_angles(pot, AIR)
pw = potential_wedge_solutions(pot, math.radians(10), AIR)
print(f"potential detachment {math.degrees(pc.theta_d):.3f} deg, weak beta {math.degrees(pw.weak.beta):.3f} deg")
