# %% [markdown]
# # The self-similar picture of a wedge suddenly placed in a stream
#
# In potential flow the unsteady problem is self-similar: everything
# depends on xi = x / t.  Far from the wedge tip the solution is made of
# constant states joined by straight shocks, and this skeleton can be
# built and checked exactly.

# %%
import math

from wedgeflow import AIR, build_skeleton, phi_star_eval, verify_skeleton

sk = build_skeleton(AIR, 2.0, 1.0, math.radians(10))
print("branch:", sk.branch.value)
print(f"weak oblique shock angle {math.degrees(sk.beta):.3f} deg")
print(f"rho1 = {sk.rho1:.5f} behind the oblique shock, rho2 = {sk.rho2:.5f} behind the wall-parallel shock")

# %% [markdown]
# The report collects Rankine-Hugoniot and jump residuals, the equation
# residual in each constant region and the entropy inequalities.

# %%
rep = verify_skeleton(sk)
print("all checks passed:", rep.passed)
for k, v in sorted(rep.flags.items()):
    print(f"  {k:20s} {v}")

# %% [markdown]
# Points in the constant-state regions evaluate to a pseudo-potential.
# The part of the domain bounded by the curved shock is not computed and
# is reported as unknown.

# %%
for xi in ((3.0, 2.0), (0.5, 0.2), (1.5, 0.5)):
    print(xi, phi_star_eval(sk, xi))

# %% [markdown]
# Beyond the sonic angle the state behind the oblique shock becomes
# subsonic and the skeleton switches branch.

# %%
print(build_skeleton(AIR, 2.0, 1.0, math.radians(29)).branch.value)
