"""Instance-independent exterior calculus over functional algebras.

Derivations indexed by vector fields act on any of the lifted instances;
generated forms a0 da1 ^ ... ^ dak evaluate through determinants of
derivation pairings.  The classical identities — Cartan's homotopy
formula, graded commutativity, rank degeneracy — hold verbatim, here
displayed on the particle-measure instance.
"""

import numpy as np

from lifted import (Derivation, Form, cartan_residual, degeneracy_residual,
                    eval_form, exterior_d, interior_bracket_residual,
                    measure_geometry, wedge)

inst = measure_geometry(dim=2, n=2)
rng = np.random.default_rng(7)

a = inst.sample_element(rng)
b = inst.sample_element(rng)
c = inst.sample_element(rng)
p = inst.sample_point(rng)

alpha = Derivation.basic(inst.sample_field(rng))
beta = Derivation.basic(inst.sample_field(rng))

# A generated 2-form evaluated on two derivations at a point.
omega = Form.generated(a, (b, c))
val = eval_form(inst, omega, p, (alpha, beta))
swapped = eval_form(inst, omega, p, (beta, alpha))
print(f"omega(alpha, beta) = {val:+.9f}   swapped = {swapped:+.9f}"
      f"   antisymmetry gap {abs(val + swapped):.2e}")

# d squared vanishes identically.
ddf = exterior_d(inst, exterior_d(inst, Form.generated(a)))
print(f"(d d a)(alpha, beta) = {eval_form(inst, ddf, p, (alpha, beta)):.2e}")

# Wedge products graded-commute.
one = Form.generated(a, (b,))
other = Form.generated(c, (inst.sample_element(rng),))
lhs = eval_form(inst, wedge(one, other), p, (alpha, beta))
rhs = -eval_form(inst, wedge(other, one), p, (alpha, beta))
print(f"wedge graded-commutation gap = {abs(lhs - rhs):.2e}")

# Cartan's homotopy formula with a module-coefficient derivation.
d = Derivation.combination([inst.sample_element(rng)], [inst.sample_field(rng)])
probes = [(inst.sample_point(rng), (Derivation.basic(inst.sample_field(rng)),))
          for _ in range(3)]
print(f"homotopy formula residual = {cartan_residual(inst, d, one, probes):.2e}")

# Contraction along a bracket is the commutator of Lie derivative and
# contraction; contracting the 2-form once leaves one argument slot.
print(f"bracket contraction residual = "
      f"{interior_bracket_residual(inst, d, alpha, omega, [(p, (beta,))]):.2e}")

# Forms of degree r+1 vanish on derivations drawn from an r-field span.
print(f"rank-2 degeneracy residual = {degeneracy_residual(inst, 2, rng):.2e}")
