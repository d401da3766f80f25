# Geometric coherence of the maximally coherent state mixed with white noise,
# next to its closed form and the general lower/upper bounds.
# For d = 3 the numerical curve sits on the upper bound.
import numpy as np

from geomeasures import coherence_mcms_analytic, geometric_coherence, make_mcms

d = 3
print(" p      value         closed form   lower         upper")
for p in np.linspace(0, 1, 11):
    res = geometric_coherence(make_mcms(d, p))
    lo, hi = res.bounds
    print(f"{p:4.2f}  {res.value:.10f}  {coherence_mcms_analytic(d, p):.10f}  {lo:.10f}  {hi:.10f}")

# the closest incoherent state is the uniform diagonal one
res = geometric_coherence(make_mcms(d, 0.5))
print("closest incoherent diagonal:", np.diag(res.closest_state.mat).real.round(8))
