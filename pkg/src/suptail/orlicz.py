"""Power Orlicz family |x|^alpha/alpha: conjugate, inverse, entropy kernel, tail bound."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhiFamily:
    """The convex pair phi(x) = |x|^alpha/alpha, phi*(x) = |x|^beta/beta.

    alpha is restricted to (1, 2]; the conjugate exponent beta = alpha/(alpha-1)
    satisfies 1/alpha + 1/beta = 1 and beta >= 2, with beta = 2 exactly in the
    Gaussian case alpha = 2.  The constants of the closed-form supremum bounds
    are derived under this range, so alpha = 1 and alpha > 2 are rejected.
    """

    alpha: float

    def __post_init__(self) -> None:
        if not (1.0 < self.alpha <= 2.0):
            raise ValueError(f"alpha must lie in (1, 2], got {self.alpha}")

    @property
    def beta(self) -> float:
        return self.alpha / (self.alpha - 1.0)


#: Gaussian / sub-Gaussian specialization.
GAUSSIAN = PhiFamily(2.0)


def phi_value(x: float, fam: PhiFamily) -> float:
    """phi(x) = |x|^alpha / alpha.  Even in x, zero only at x = 0."""
    return abs(x) ** fam.alpha / fam.alpha


def phi_conjugate(x: float, fam: PhiFamily) -> float:
    """Young-Fenchel conjugate phi*(x) = sup_y (xy - phi(y)) = |x|^beta / beta."""
    return abs(x) ** fam.beta / fam.beta


def phi_inverse(y: float, fam: PhiFamily) -> float:
    """Inverse of phi on [0, inf): (alpha*y)^(1/alpha)."""
    if y < 0:
        raise ValueError(f"phi_inverse requires y >= 0, got {y}")
    return (fam.alpha * y) ** (1.0 / fam.alpha)


def psi_kernel(v: float, fam: PhiFamily) -> float:
    """Entropy-integral kernel v / phi_inverse(v) = v^(1/beta) * alpha^(-1/alpha).

    Defined as 0 at v = 0 (the continuity limit), so entropy quadrature never
    divides by zero.
    """
    if v < 0:
        raise ValueError(f"psi_kernel requires v >= 0, got {v}")
    if v == 0.0:
        return 0.0
    return v / phi_inverse(v, fam)


def rv_tail_bound(u: float, tau: float, fam: PhiFamily) -> float:
    """Two-sided tail bound min(1, 2*exp(-phi*(u/tau))) for a variable of norm tau.

    Nonincreasing in u, nondecreasing in tau.  Clamped to [0, 1]: the raw
    expression exceeds 1 for small u.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if u < 0:
        raise ValueError(f"u must be nonnegative, got {u}")
    return min(1.0, 2.0 * math.exp(-phi_conjugate(u / tau, fam)))
