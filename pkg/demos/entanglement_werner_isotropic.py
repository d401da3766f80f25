# Geometric entanglement of Werner and isotropic states from the PPT
# relaxation.  For qubit pairs the relaxation is exact; for Werner states it
# matches the closed form in every dimension tried here.
import numpy as np

from geomeasures import gme_ppt, make_isotropic, make_werner, werner_gme_analytic
from geomeasures.measures import concurrence, gme_two_qubit_analytic

print("Werner states, d = 3")
print("  f      E_G (SDP)     closed form")
for f in np.linspace(-1, 1, 9):
    val = gme_ppt(make_werner(3, f), (3, 3)).value
    print(f"{f:5.2f}  {val:.10f}  {werner_gme_analytic(f):.10f}")

print()
print("isotropic states, d = 2 (closed form via concurrence)")
for F in np.linspace(0, 1, 6):
    rho = make_isotropic(2, F)
    print(f"F={F:.1f}  SDP {gme_ppt(rho, (2, 2)).value:.10f}  "
          f"closed form {gme_two_qubit_analytic(concurrence(rho)):.10f}")

print()
print("isotropic states, d = 3: zero up to F = 1/3, then rising")
for F in np.linspace(0, 1, 7):
    print(f"F={F:.3f}  lower bound {gme_ppt(make_isotropic(3, F), (3, 3)).value:.3e}")
