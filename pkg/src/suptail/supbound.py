"""Supremum bounds over a bounded anisotropic box: MGF bound, tail bound, theta search.

All bounds share the structure 2*exp(-phi*(z(theta))) with

    z(theta) = (u*(1-theta) - (2/theta) * I(theta*eps0)) / eps0,

I the entropy integral (closed form or numeric).  The bound is asserted only
for z > 0, i.e. u above ``u_threshold``; it is decreasing in z, so the optimal
theta maximizes z, which is concave in theta.

Separability of the field on the box is a modeling assumption the caller must
supply; it is not checkable numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import HolderProfile, c1_constant, entropy_integral_closed, entropy_integral_numeric
from .metric import AnisotropicBox
from .orlicz import PhiFamily, phi_conjugate, phi_value


@dataclass(frozen=True)
class FieldBoundInputs:
    """Everything the bounded-domain bounds need.

    eps0 is the supremum of the field's Orlicz norm over the box; gamma0 (the
    modulus at the box diameter) caps the usable theta range via
    theta*eps0 < gamma0.
    """

    eps0: float
    box: AnisotropicBox
    prof: HolderProfile
    fam: PhiFamily

    def __post_init__(self) -> None:
        if self.eps0 <= 0:
            raise ValueError(f"eps0 must be positive, got {self.eps0}")

    @property
    def gamma0(self) -> float:
        return self.prof.sigma(self.box.diameter)

    @property
    def c1(self) -> float:
        return c1_constant(self.box, self.prof, self.fam)

    @property
    def theta_cap(self) -> float:
        """Upper end of the valid theta range, min(1, gamma0/eps0)."""
        return min(1.0, self.gamma0 / self.eps0)

    def entropy_closed(self, eps: float) -> float:
        return entropy_integral_closed(eps, self.c1, self.prof, self.fam)

    def entropy_numeric(self, eps: float, tol: float = 1e-8) -> float:
        return entropy_integral_numeric(eps, self.box, self.prof, self.fam, tol=tol)


def _check_theta(theta: float, inputs: FieldBoundInputs, strict: bool) -> None:
    if not (0.0 < theta < 1.0):
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    te = theta * inputs.eps0
    # Strict < for the closed form, <= for the numeric route; the difference
    # is a measure-zero boundary.
    if (strict and te >= inputs.gamma0) or (not strict and te > inputs.gamma0):
        raise ValueError(
            f"theta*eps0 = {te} exceeds gamma0 = {inputs.gamma0}; bound not valid"
        )


def u_threshold(theta: float, inputs: FieldBoundInputs) -> float:
    """Smallest u (exclusive) for which the closed-form tail bound is asserted:

        2/(theta*(1-theta)) * I(theta*eps0),  I the closed-form entropy integral.
    """
    _check_theta(theta, inputs, strict=True)
    itil = inputs.entropy_closed(theta * inputs.eps0)
    return 2.0 / (theta * (1.0 - theta)) * itil


def _tail_from_entropy(u: float, theta: float, inputs: FieldBoundInputs, itil: float) -> float:
    threshold = 2.0 / (theta * (1.0 - theta)) * itil
    if u <= threshold:
        raise ValueError(f"u = {u} is below validity threshold {threshold}")
    z = (u * (1.0 - theta) - 2.0 / theta * itil) / inputs.eps0
    return min(1.0, 2.0 * math.exp(-phi_conjugate(z, inputs.fam)))


def sup_tail_bound(u: float, theta: float, inputs: FieldBoundInputs) -> float:
    """Closed-form tail bound on P{sup |X| > u}; requires u > u_threshold(theta).

    Strictly decreasing in u on the valid range, clamped to [0, 1].
    """
    _check_theta(theta, inputs, strict=True)
    itil = inputs.entropy_closed(theta * inputs.eps0)
    return _tail_from_entropy(u, theta, inputs, itil)


def sup_tail_bound_numeric(
    u: float, theta: float, inputs: FieldBoundInputs, tol: float = 1e-8
) -> float:
    """Tail bound using the numeric entropy integral.

    The numeric integral never exceeds the closed form, so at identical
    (u, theta) this bound never exceeds ``sup_tail_bound``.
    """
    _check_theta(theta, inputs, strict=False)
    itil = inputs.entropy_numeric(theta * inputs.eps0, tol=tol)
    return _tail_from_entropy(u, theta, inputs, itil)


def sup_mgf_bound(lam: float, theta: float, inputs: FieldBoundInputs) -> float:
    """Bound on E exp(lam * sup |X|):

        2*exp( phi(lam*eps0/(1-theta)) + 2*lam/(theta*(1-theta)) * I(theta*eps0) ).
    """
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    _check_theta(theta, inputs, strict=True)
    itil = inputs.entropy_closed(theta * inputs.eps0)
    exponent = phi_value(lam * inputs.eps0 / (1.0 - theta), inputs.fam)
    exponent += 2.0 * lam / (theta * (1.0 - theta)) * itil
    return 2.0 * math.exp(exponent)


def _z_of_theta(u: float, theta: float, inputs: FieldBoundInputs) -> float:
    itil = inputs.entropy_closed(theta * inputs.eps0)
    return (u * (1.0 - theta) - 2.0 / theta * itil) / inputs.eps0


def optimize_theta(
    u: float,
    inputs: FieldBoundInputs,
    n_grid: int = 512,
    theta_tol: float = 1e-10,
) -> tuple[float, float]:
    """Minimize the closed-form tail bound over valid theta.

    The bound is decreasing in z(theta), which is concave, so the search
    maximizes z: a log-spaced coarse grid over (0, theta_cap) followed by
    golden-section refinement to ``theta_tol``.  Deterministic.

    Returns (theta_star, bound).  Raises if no theta satisfies
    u > u_threshold(theta) ("no valid theta").
    """
    cap = inputs.theta_cap
    hi = cap * (1.0 - 1e-12)
    lo = min(1e-8, hi * 1e-3)
    grid = np.geomspace(lo, hi, n_grid)
    zs = np.array([_z_of_theta(u, float(t), inputs) for t in grid])
    k = int(np.argmax(zs))

    lo_b = grid[k - 1] if k > 0 else grid[0] * 0.5
    hi_b = grid[k + 1] if k < n_grid - 1 else hi
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo_b, hi_b
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = _z_of_theta(u, c, inputs)
    fd = _z_of_theta(u, d, inputs)
    while b - a > theta_tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _z_of_theta(u, c, inputs)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _z_of_theta(u, d, inputs)
    theta_star = 0.5 * (a + b)
    z_star = _z_of_theta(u, theta_star, inputs)
    best = max([(z_star, theta_star)] + [(float(z), float(t)) for z, t in zip(zs, grid)])
    z_star, theta_star = best
    if z_star <= 0.0:
        raise ValueError(f"no valid theta: u = {u} is below every validity threshold")
    bound = min(1.0, 2.0 * math.exp(-phi_conjugate(z_star, inputs.fam)))
    return theta_star, bound
