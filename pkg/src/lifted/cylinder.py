"""Shared shape of the functionals all instances use.

Every functional in this library is an outer scalar field psi on R^n
composed with n pairings of generator objects against a point of the
underlying set (integrals of test functions against a measure, integrals
of forms over a submanifold, action densities along a curve, ...).  The
algebra operations and the lifted derivative act on that shape uniformly:

* sums/products combine the outer functions on the concatenated generator
  list (block pullbacks keep the oracles exact),
* the lifted derivative doubles the generator list with the derived
  generators and replaces psi by xi(r, s) = sum_i s_i ∂psi/∂r_i(r).

Subclasses fix what a generator is, how it pairs with a point, and how a
vector field acts on it.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError
from .fields import (ScalarField, block_pullback, f_add, f_mul, f_partial,
                     f_scale, xi_from_psi)
from .smooth import VectorField

__all__ = ["PairingFunctional"]


class PairingFunctional:
    """F(p) = psi(pairing(g_1, p), ..., pairing(g_n, p))."""

    def __init__(self, psi: ScalarField, generators, label: str = ""):
        generators = tuple(generators)
        if psi.dim != len(generators):
            raise InvalidArgumentError(
                f"psi expects {psi.dim} arguments, got {len(generators)} generators")
        if not generators:
            raise InvalidArgumentError("at least one generator is required")
        self.psi = psi
        self.generators = generators
        self.label = label or type(self).__name__

    # -- subclass surface --------------------------------------------------
    def _pair(self, point) -> np.ndarray:
        """Vector of the n pairings at the point."""
        raise NotImplementedError

    def _derive_generator(self, v: VectorField, gen):
        raise NotImplementedError

    def _check_derive(self, v: VectorField) -> None:
        """Instance-specific admissibility of v (raises on violation)."""
        if not v.complete:
            raise InvalidArgumentError(
                "lifted derivatives require a complete vector field")

    def _clone(self, psi, generators, label):
        return type(self)(psi, generators, label=label)

    # -- common algebra ------------------------------------------------------
    def value(self, point) -> float:
        r = np.asarray(self._pair(point), dtype=float)
        return float(self.psi.eval(r))

    def derive(self, v: VectorField) -> "PairingFunctional":
        """Lifted derivative along v, in closed cylinder form."""
        self._check_derive(v)
        derived = tuple(self._derive_generator(v, g) for g in self.generators)
        return self._clone(xi_from_psi(self.psi), self.generators + derived,
                           label=f"D[{self.label}]")

    def partials(self):
        """The functionals psi -> ∂psi/∂r_i with the same generators."""
        return [self._clone(f_partial(self.psi, i), self.generators,
                            label=f"{self.label}.d{i}")
                for i in range(self.psi.dim)]

    def add(self, other: "PairingFunctional") -> "PairingFunctional":
        self._check_combinable(other)
        n, n2 = self.psi.dim, other.psi.dim
        psi = f_add(block_pullback(self.psi, n + n2, 0),
                    block_pullback(other.psi, n + n2, n))
        return self._clone(psi, self.generators + other.generators,
                           label=f"({self.label}+{other.label})")

    def mul(self, other: "PairingFunctional") -> "PairingFunctional":
        self._check_combinable(other)
        n, n2 = self.psi.dim, other.psi.dim
        psi = f_mul(block_pullback(self.psi, n + n2, 0),
                    block_pullback(other.psi, n + n2, n))
        return self._clone(psi, self.generators + other.generators,
                           label=f"({self.label}*{other.label})")

    def scale(self, c: float) -> "PairingFunctional":
        return self._clone(f_scale(float(c), self.psi), self.generators,
                           label=f"{c}*{self.label}")

    def _check_combinable(self, other) -> None:
        if type(other) is not type(self):
            raise InvalidArgumentError(
                "can only combine functionals of the same instance")

    def __add__(self, other):
        return self.add(other)

    def __mul__(self, other):
        if isinstance(other, PairingFunctional):
            return self.mul(other)
        return self.scale(float(other))

    __rmul__ = __mul__
