# Fidelity of two random qutrit states, once from the spectrum and once
# as the optimum of a semidefinite program.
import numpy as np

from geomeasures import fidelity_direct, fidelity_sdp, random_ginibre_density

rho = random_ginibre_density(3, seed=1)
chi = random_ginibre_density(3, seed=2)

f_direct = fidelity_direct(rho, chi)
f_sdp, stats = fidelity_sdp(rho, chi)

print("spectral fidelity :", f_direct)
print("SDP fidelity      :", f_sdp)
print("difference        : %.2e" % abs(f_direct - f_sdp))
print("solver            :", stats["status"], "after", stats["iterations"], "iterations")

# F(rho, rho) is 1 and the SDP knows it too
print("F(rho, rho) via SDP:", fidelity_sdp(rho, rho)[0])

# orthogonal pure states have zero overlap
print("F(|0>, |1>)       :", fidelity_direct(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
