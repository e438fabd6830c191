"""Action functionals on curves and derivatives along prolonged flows.

A curve carries positions and velocities; densities on that doubled space
integrate to actions.  Deforming the curve by a flow moves velocities by
the Jacobian of the field — the prolonged flow — and the lifted derivative
accounts for that in closed form.
"""

import numpy as np

from lifted import (ActionFunctional, PolynomialField, circle_curve,
                    kinetic_density, lie_bracket, line_curve,
                    polynomial_curve, prolong, push_curve,
                    scaled_bump_field, smoothed_speed_density)

identity = PolynomialField(1, {(1,): 1.0})

# The kinetic action of the unit-speed circle over a full period is 2 pi.
circle = circle_curve()
kinetic = ActionFunctional(identity, [kinetic_density(2)], label="kinetic")
print(f"kinetic action of the circle = {kinetic.value(circle):.12f}"
      f"   (2 pi = {2 * np.pi:.12f})")

# Smoothed arc length is invariant under reparametrization: the same
# segment traversed at twice the speed over half the interval.
length = ActionFunctional(identity, [smoothed_speed_density(2)])
seg = line_curve([0.0, 0.0], [1.0, 2.0], 0.0, 1.0)
fast = line_curve([0.0, 0.0], [2.0, 4.0], 0.0, 0.5)
print(f"arc length slow/fast = {length.value(seg):.12f} / "
      f"{length.value(fast):.12f}")

# Lifted derivative of a potential-type action along a compactly
# supported field, against a central difference through the prolonged flow.
v = scaled_bump_field([0.2, 0.0], 3.0, [{(0, 0): 0.5, (0, 1): -0.2},
                                        {(1, 0): 0.3}])
C = polynomial_curve([[0.1, -0.2], [0.8, 0.5], [-0.3, 0.4]], 0.0, 1.5)
potential = ActionFunctional(identity, [PolynomialField(4, {(2, 0, 0, 0): 1.0,
                                                            (0, 1, 0, 1): 0.5})])
dv = potential.derive(v).value(C)
t = 1e-4
fd = (potential.value(push_curve(v, t, C))
      - potential.value(push_curve(v, -t, C))) / (2 * t)
print(f"lifted derivative = {dv:+.12f}   central difference = {fd:+.12f}"
      f"   gap {abs(dv - fd):.2e}")

# The prolongation is a morphism of Lie algebras: prolong([v, w]) equals
# the bracket of the prolongations on the doubled space.
w = scaled_bump_field([-0.1, 0.3], 2.5, [{(1, 0): 0.4}, {(0, 0): -0.3}])
lhs = prolong(lie_bracket(v, w))
rhs = lie_bracket(prolong(v), prolong(w))
X = np.random.default_rng(5).normal(0.0, 0.6, size=(6, 4))
print(f"prolongation bracket gap = {np.max(np.abs(lhs.eval(X) - rhs.eval(X))):.2e}")
