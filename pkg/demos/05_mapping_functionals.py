"""Functionals of finite-label mappings and their structure maps.

A mapping assigns a point in R^m to each of finitely many labels; a
functional pairs it against a product of label measures through a kernel.
Derivatives lift along flows applied to the values, label precomposition
rewrites through pushforward measures, and only the field's values on the
mapping's range matter.
"""

import numpy as np

from lifted import (LabeledSpace, MappingFunctional, MappingPoint,
                    precompose, push_mapping, scaled_bump_field)
from lifted.fields import BumpField, PolynomialField, f_mul

# Three labels, two measures on them.
space = LabeledSpace(3, {"uniform": [1.0, 1.0, 1.0], "tilted": [0.2, 0.5, 1.3]})
P = MappingPoint([[0.4, -0.1], [-0.3, 0.2], [0.1, 0.6]])

# An arity-2 kernel on R^4 = R^2 x R^2, localized by a bump.
kernel = f_mul(BumpField([0.0] * 4, 4.0),
               PolynomialField(4, {(1, 0, 0, 1): 1.0, (0, 2, 0, 0): -0.5}))
F = MappingFunctional(kernel, [space.measures["uniform"],
                               space.measures["tilted"]], base_dim=2)
print(f"F(P) = {F.value(P):+.12f}")

# Closed-form lifted derivative vs central difference along the flow.
v = scaled_bump_field([0.0, 0.0], 3.0, [{(0, 1): 0.4}, {(1, 0): -0.25}])
dv = F.derive(v).value(P)
t = 1e-4
fd = (F.value(push_mapping(v, t, P)) - F.value(push_mapping(v, -t, P))) / (2 * t)
print(f"lifted derivative = {dv:+.12f}   central difference = {fd:+.12f}"
      f"   gap {abs(dv - fd):.2e}")

# Precomposing labels rewrites the functional through pushed measures:
# collapse labels {0, 1} -> 0 and {2} -> 1.
pi = np.array([0, 0, 1])
target = LabeledSpace(2, {"uniform": [2.0, 1.0], "tilted": [0.7, 1.3]})
G = precompose(pi, space, target, F)
Q = MappingPoint([[0.25, 0.1], [-0.4, 0.3]])
print(f"precompose residual = "
      f"{abs(G.value(Q) - F.value(Q.compose_labels(pi))):.2e}")

# Only the field's values on the mapping's range matter: adding a field
# supported far away changes nothing.
far = scaled_bump_field([50.0, 50.0], 1.0, [{(0, 0): 1.0}, {(0, 0): 1.0}])
print(f"far-field derivative gap = "
      f"{abs(F.derive(v + far).value(P) - dv):.2e}")
