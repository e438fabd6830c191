"""Quadratic energies of measure functionals and their contraction property.

Averaging the squared gradient norm over an ensemble of measures gives a
quadratic energy.  Post-composing the functional with a contraction that
fixes zero can only shrink that energy; a slope-one linear map leaves it
exactly unchanged.  Both facts are displayed numerically below.
"""

import numpy as np

from lifted import (LinearProfile, MeasureEnsemble, ParticleMeasure,
                    TanhProfile, dirichlet_form, euclidean_metric,
                    markov_defect)
from lifted.fields import BumpField, PolynomialField, f_mul
from lifted.measures import MeasureFunctional

rng = np.random.default_rng(11)

# An ensemble of three random particle measures with probabilities.
measures = [ParticleMeasure(rng.normal(0, 0.5, size=(3, 2)),
                            rng.uniform(0.3, 1.0, size=3)) for _ in range(3)]
ensemble = MeasureEnsemble(measures, [0.5, 0.3, 0.2])
g = euclidean_metric(2)

# The energy needs a compactly supported outer function, so psi is a bump
# times a polynomial on the pairing space.
phi = f_mul(BumpField([0.0, 0.0], 2.5), PolynomialField(2, {(1, 0): 1.0, (0, 1): -0.6}))
psi = f_mul(BumpField([0.0], 5.0), PolynomialField(1, {(1,): 1.0, (2,): 0.25}))
F = MeasureFunctional(psi, [phi], label="F")

energy = dirichlet_form(F, F, ensemble, g)
print(f"E(F, F) = {energy:.12f}")

# tanh fixes 0 and has slope at most 1, so composing can only lose energy.
contracted, plain = markov_defect(F, TanhProfile(), ensemble, g)
print(f"E(tanh o F) = {contracted:.12f}  <=  E(F) = {plain:.12f}  "
      f"(margin {plain - contracted:+.3e})")

# The slope-one linear contraction is the tight case: nothing is lost.
same, ref = markov_defect(F, LinearProfile(1.0), ensemble, g)
print(f"E(id o F)   = {same:.12f}  ==  E(F) = {ref:.12f}  "
      f"(gap {abs(same - ref):.3e})")

# Halving the slope scales the energy by exactly 1/4 (the energy is
# quadratic in the outer function's first derivative).
quarter, _ = markov_defect(F, LinearProfile(0.5), ensemble, g)
print(f"E(0.5 F)    = {quarter:.12f}  vs  E(F)/4 = {ref / 4:.12f}  "
      f"(gap {abs(quarter - ref / 4):.3e})")
