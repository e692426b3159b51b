"""Rate-of-growth bounds over the strip [0, inf) x [-A, A].

The weighted supremum sup |X(t1,t2)| / f(t1) is controlled through two series
over a partition of the time axis into cells [b_k, b_{k+1}] x [-A, A]:

    C = sum_k eps_k / f_k,
    S = sum_k eps_k^(1 - 1/(gamma*beta)) * c1(k) / f_k,

with c1(k) the per-cell entropy constant.  Both series are summed with a
certified remainder; the tail bound, its power-envelope variant (eps_k
substituted by scale * b_{k+1}^delta), the fixed-theta closed form, and the
almost-sure envelope tail all reduce to (C, S) or their substituted versions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .orlicz import PhiFamily


class SeriesError(RuntimeError):
    """Series summation failed to certify convergence."""


@dataclass(frozen=True)
class GrowthSpec:
    """Inputs for the growth bounds.

    partition(k) = b_k must be nondecreasing to infinity with b_0 >= 0;
    weight is the normalizing f evaluated at partition points and must be
    positive there; cell_sup(k) bounds the field's Orlicz norm on cell k;
    cell_holder(k) is the Holder scale c_k of the increment modulus
    c_k * h^gamma on cell k.  h1/h2 are the metric exponents, halfwidth the
    strip half-width A.

    power_delta/power_scale describe the envelope variant with
    cell_sup(k) = power_scale * b_{k+1}^power_delta.

    log_term_c / log_term_s optionally give ln of the series terms directly;
    they let partitions like b_k = e^k be summed far past float overflow and
    must agree with the plain terms where both are finite.
    """

    partition: Callable[[int], float]
    weight: Callable[[float], float]
    halfwidth: float
    cell_sup: Callable[[int], float]
    cell_holder: Callable[[int], float]
    gamma: float
    h1: float
    h2: float
    fam: PhiFamily
    power_delta: Optional[float] = None
    power_scale: Optional[float] = None
    log_term_c: Optional[Callable] = None
    log_term_s: Optional[Callable] = None

    def __post_init__(self) -> None:
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not (0.0 < self.h1 <= 1.0 and 0.0 < self.h2 <= 1.0):
            raise ValueError("metric exponents must lie in (0, 1]")
        if self.halfwidth < 0:
            raise ValueError(f"halfwidth must be >= 0, got {self.halfwidth}")

    @property
    def gamma_beta(self) -> float:
        return self.gamma * self.fam.beta

    def cell_length(self, k: int) -> float:
        l_k = self.partition(k + 1) - self.partition(k)
        if not l_k > 0:
            raise ValueError(f"partition must be strictly increasing; l_{k} = {l_k}")
        return l_k

    def weight_at(self, k: int) -> float:
        f_k = self.weight(self.partition(k))
        if not f_k > 0:
            raise ValueError(f"weight must be positive at partition points; f_{k} = {f_k}")
        return f_k


def cell_constant(k: int, spec: GrowthSpec) -> float:
    """Per-cell entropy constant

        c1(k) = ((1/h1)(l_k/2)^(h1/beta) + (1/h2) A^(h2/beta))
                * 2^(1/beta) c_k^(1/(gamma*beta)) / (1 - 1/(gamma*beta)).
    """
    gb = spec.gamma_beta
    if gb <= 1.0:
        raise ValueError(f"cell constant requires gamma*beta > 1, got {gb}")
    beta = spec.fam.beta
    l_k = spec.cell_length(k)
    c_k = spec.cell_holder(k)
    if c_k <= 0:
        raise ValueError(f"cell_holder must be positive, got {c_k} at k = {k}")
    axis = (l_k / 2.0) ** (spec.h1 / beta) / spec.h1
    axis += spec.halfwidth ** (spec.h2 / beta) / spec.h2
    return axis * 2.0 ** (1.0 / beta) * c_k ** (1.0 / gb) / (1.0 - 1.0 / gb)


@dataclass(frozen=True)
class SeriesSum:
    """Certified partial sum: |value - true sum| <= remainder."""

    value: float
    remainder: float
    n_terms: int


def _eval_terms(term, lo: int, hi: int, log_term=None) -> np.ndarray:
    """Evaluate terms on [lo, hi); vectorized when the closure allows it."""
    ks = np.arange(lo, hi)
    f = log_term if log_term is not None else term
    try:
        out = np.asarray(f(ks), dtype=float)
        if out.shape != ks.shape:
            raise TypeError
    except (TypeError, ValueError):
        out = np.array([float(f(int(k))) for k in ks])
    if log_term is not None:
        with np.errstate(over="ignore"):
            out = np.exp(out)
    return out


def _eval_one(term, k: int, log_term=None) -> float:
    if log_term is not None:
        lv = float(log_term(k))
        if lv <= -745.0:
            return 0.0
        return math.exp(lv) if lv <= 709.0 else math.inf
    return float(term(k))


def _remainder_bracket(term, start: int, log_term=None) -> tuple[float, float] | None:
    """Bracket sum_{k >= start} a_k for positive, eventually decreasing terms.

    Blocks of length ~s/4 (growing by ~5/4): each block sum lies between
    L*a(next block start) and L*a(s).  If the probed horizon is exhausted
    before the block bounds underflow, the remaining tail is closed
    geometrically from the observed block-bound ratio (valid when the ratio
    is nonincreasing, which holds for power-law, exponential, and mixed
    decay).  Returns None when no certificate is possible at this checkpoint
    (e.g. terms still increasing).
    """
    upper = 0.0
    lower = 0.0
    s = start
    a_s = _eval_one(term, s, log_term)
    if not np.isfinite(a_s) or a_s < 0:
        return None
    block_ups: list[float] = []
    for _ in range(128):
        length = max(s // 4, 1)  # blocks grow by ~5/4; tighter than doubling
        a_next = _eval_one(term, s + length, log_term)
        if not np.isfinite(a_next) or a_next < 0 or a_next > a_s:
            return None  # terms not decreasing here; cannot certify yet
        block_up = length * a_s
        upper += block_up
        lower += length * a_next
        block_ups.append(block_up)
        if block_up < 1e-320:
            return lower, upper  # tail is numerically zero
        s += length
        a_s = a_next
    if len(block_ups) < 3 or block_ups[-3] <= 0 or block_ups[-2] <= 0:
        return None
    rho = max(block_ups[-1] / block_ups[-2], block_ups[-2] / block_ups[-3])
    if rho >= 0.95:
        return None
    upper += block_ups[-1] * rho / (1.0 - rho)
    return lower, upper


def sum_series(
    term,
    tol: float = 1e-9,
    k_max: int = 10 ** 6,
    log_term=None,
    chunk: int = 4096,
) -> SeriesSum:
    """Sum a positive series with a certified remainder at most ``tol``.

    Terms are accumulated in chunks; at doubling checkpoints the remainder is
    bracketed by ``_remainder_bracket`` and the midpoint correction is applied
    once the bracket half-width is within tol.  Raises SeriesError when no
    certificate is reached within k_max terms (divergence or too-slow decay).
    """
    total = 0.0
    k = 0
    next_check = 64
    while k < k_max:
        hi = min(k + chunk, k_max, next_check)
        vals = _eval_terms(term, k, hi, log_term)
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise SeriesError(
                f"series terms must be finite and nonnegative; offending block at k = {k}"
            )
        total += float(np.sum(vals))
        k = hi
        if k >= next_check or k >= k_max:
            bracket = _remainder_bracket(term, k, log_term)
            if bracket is not None:
                lower, upper = bracket
                half = 0.5 * (upper - lower)
                if half <= tol and np.isfinite(upper):
                    return SeriesSum(total + 0.5 * (upper + lower), half, k)
            next_check = max(next_check * 2, k + 1)
    raise SeriesError(
        f"series did not certify convergence within {k_max} terms (tol = {tol})"
    )


def _safe_eval(f, arg):
    """Evaluate a closure, mapping float overflow at far tail probes to inf."""
    try:
        return f(arg)
    except OverflowError:
        return math.inf


def _term_pieces(spec: GrowthSpec, k):
    """cell_sup and weight at cell k; negative norms and nonpositive weights raise.

    Underflow of cell_sup to exact 0 and overflow of the weight to inf are
    allowed: both send the term to 0, which is its true limit.
    """
    e_k = _safe_eval(spec.cell_sup, k)
    if np.any(np.asarray(e_k) < 0):
        raise ValueError(f"cell_sup must be nonnegative, got {e_k} at k = {k}")
    b_k = _safe_eval(spec.partition, k)
    w_k = _safe_eval(spec.weight, b_k)
    if np.any(np.asarray(w_k) <= 0):
        raise ValueError(f"weight must be positive at partition points; got {w_k} at k = {k}")
    return e_k, w_k


def _series_c_term(spec: GrowthSpec):
    def term(k):
        e_k, w_k = _term_pieces(spec, k)
        with np.errstate(invalid="ignore"):
            out = np.asarray(e_k, dtype=float) / np.asarray(w_k, dtype=float)
        return out if np.ndim(out) else float(out)

    return term


def _series_s_term(spec: GrowthSpec):
    gb = spec.gamma_beta

    def term(k):
        e_k, w_k = _term_pieces(spec, k)
        c1k = _safe_eval(lambda kk: cell_constant(kk, spec), k)
        with np.errstate(invalid="ignore"):
            out = (
                np.asarray(e_k, dtype=float) ** (1.0 - 1.0 / gb)
                * np.asarray(c1k, dtype=float)
                / np.asarray(w_k, dtype=float)
            )
        return out if np.ndim(out) else float(out)

    return term


def series_c_sum(spec: GrowthSpec, tol: float = 1e-9, k_max: int = 10 ** 6) -> SeriesSum:
    return sum_series(_series_c_term(spec), tol=tol, k_max=k_max, log_term=spec.log_term_c)


def series_s_sum(spec: GrowthSpec, tol: float = 1e-9, k_max: int = 10 ** 6) -> SeriesSum:
    if spec.gamma_beta <= 1.0:
        raise ValueError(f"series S requires gamma*beta > 1, got {spec.gamma_beta}")
    return sum_series(_series_s_term(spec), tol=tol, k_max=k_max, log_term=spec.log_term_s)


def series_C(spec: GrowthSpec, tol: float = 1e-9, k_max: int = 10 ** 6) -> float:
    """C = sum_k eps_k / f_k with certified remainder <= tol."""
    return series_c_sum(spec, tol=tol, k_max=k_max).value


def series_S(spec: GrowthSpec, tol: float = 1e-9, k_max: int = 10 ** 6) -> float:
    """S = sum_k eps_k^(1-1/(gamma*beta)) c1(k) / f_k with certified remainder <= tol."""
    return series_s_sum(spec, tol=tol, k_max=k_max).value


def theta_sup(spec: GrowthSpec, k_probe: int = 512) -> float:
    """Numeric inf_k gamma_k / eps_k over the leading cells.

    gamma_k = c_k * (diam_d of cell k)^gamma with the closed-cell diameter
    l_k^h1 + (2A)^h2.  Probing stops at the first nonfinite value (partitions
    like b_k = e^k overflow float range long after the inf has stabilized).
    """
    best = math.inf
    for k in range(k_probe):
        try:
            l_k = spec.cell_length(k)
        except (OverflowError, ValueError):
            break
        if not np.isfinite(l_k):
            break
        diam = l_k ** spec.h1 + (2.0 * spec.halfwidth) ** spec.h2
        g_k = spec.cell_holder(k) * diam ** spec.gamma
        e_k = spec.cell_sup(k)
        if not (np.isfinite(g_k) and np.isfinite(e_k)) or e_k <= 0:
            break
        best = min(best, g_k / e_k)
    if not np.isfinite(best):
        raise ValueError("could not evaluate theta_sup on any cell")
    return best


def _check_growth_theta(theta: float, spec: GrowthSpec, k_probe: int) -> None:
    cap = min(1.0, theta_sup(spec, k_probe))
    if not (0.0 < theta < cap):
        raise ValueError(f"theta must lie in (0, {cap}) for this spec, got {theta}")


def growth_tail_bound(
    u: float,
    theta: float,
    spec: GrowthSpec,
    series_tol: float = 1e-9,
    k_max: int = 10 ** 6,
    k_probe: int = 512,
    c_value: Optional[float] = None,
    s_value: Optional[float] = None,
) -> float:
    """Bound on P{sup |X(t1,t2)|/f(t1) > u}:

        2*exp( -(1/(beta*C^beta)) * (u*(1-theta) - 2*S*theta^(-1/(gamma*beta)))^beta )

    for theta in (0, min(1, theta_sup)) and u > 2S/((1-theta) theta^(1/(gamma*beta))).
    Precomputed series values can be passed to avoid resummation.
    """
    _check_growth_theta(theta, spec, k_probe)
    gb = spec.gamma_beta
    beta = spec.fam.beta
    C = series_C(spec, tol=series_tol, k_max=k_max) if c_value is None else c_value
    S = series_S(spec, tol=series_tol, k_max=k_max) if s_value is None else s_value
    threshold = 2.0 * S / ((1.0 - theta) * theta ** (1.0 / gb))
    if u <= threshold:
        raise ValueError(f"u = {u} is below validity threshold {threshold}")
    arg = u * (1.0 - theta) - 2.0 * S * theta ** (-1.0 / gb)
    return min(1.0, 2.0 * math.exp(-(arg ** beta) / (beta * C ** beta)))


def power_substituted(spec: GrowthSpec) -> GrowthSpec:
    """Spec with the envelope cells eps_k = power_scale * b_{k+1}^power_delta.

    The log-term closures are dropped: they describe the original spec's
    series.  Partitions that overflow the float range (so that plain terms
    cannot be summed) should be built with the substituted cell norms and
    matching log terms from the start, or pass precomputed series values.
    """
    if spec.power_delta is None or spec.power_scale is None:
        raise ValueError("spec has no power envelope parameters (power_delta/power_scale)")
    delta, scale = spec.power_delta, spec.power_scale
    if scale <= 0:
        raise ValueError(f"power_scale must be positive, got {scale}")

    def cell_sup(k: int) -> float:
        return scale * spec.partition(k + 1) ** delta

    return replace(spec, cell_sup=cell_sup, log_term_c=None, log_term_s=None)


def growth_tail_bound_power(
    u: float,
    theta: float,
    spec: GrowthSpec,
    series_tol: float = 1e-9,
    k_max: int = 10 ** 6,
    k_probe: int = 512,
) -> float:
    """Power-envelope variant: the growth bound with eps_k = scale * b_{k+1}^delta."""
    return growth_tail_bound(
        u, theta, power_substituted(spec), series_tol=series_tol, k_max=k_max, k_probe=k_probe
    )


def _auto_theta_form(u: float, C: float, S: float, gb: float, beta: float) -> float:
    threshold = (1.0 + 2.0 * S) ** (gb / (gb + 1.0))
    if u <= threshold:
        raise ValueError(f"u = {u} is below validity threshold {threshold}")
    arg = u - u ** (1.0 / (gb + 1.0)) * (1.0 + 2.0 * S)
    if arg <= 0.0:
        return 1.0  # exponent argument not yet positive; only the trivial bound holds
    return min(1.0, 2.0 * math.exp(-(arg ** beta) / (beta * C ** beta)))


def auto_theta_bound(
    u: float,
    spec: GrowthSpec,
    series_tol: float = 1e-9,
    k_max: int = 10 ** 6,
    c_value: Optional[float] = None,
    s_value: Optional[float] = None,
) -> float:
    """Growth bound at the closed-form choice theta = u^(-gamma*beta/(gamma*beta+1)):

        2*exp( -(1/(beta*C^beta)) * (u - u^(1/(gamma*beta+1)) (1+2S))^beta ),

    asserted for u > (1+2S)^(gamma*beta/(gamma*beta+1)).  Equals
    ``growth_tail_bound`` at the substituted theta wherever both apply.
    """
    gb = spec.gamma_beta
    C = series_C(spec, tol=series_tol, k_max=k_max) if c_value is None else c_value
    S = series_S(spec, tol=series_tol, k_max=k_max) if s_value is None else s_value
    return _auto_theta_form(u, C, S, gb, spec.fam.beta)


def envelope_tail(
    u: float,
    spec: GrowthSpec,
    series_tol: float = 1e-9,
    k_max: int = 10 ** 6,
    c_value: Optional[float] = None,
    s_value: Optional[float] = None,
) -> float:
    """Tail of the a.s. envelope variable xi with |X(t1,t2)| <= f(t1)*xi.

    The auto-theta bound evaluated on the power-substituted series (C~, S~).
    """
    sub = power_substituted(spec)
    gb = sub.gamma_beta
    C = series_C(sub, tol=series_tol, k_max=k_max) if c_value is None else c_value
    S = series_S(sub, tol=series_tol, k_max=k_max) if s_value is None else s_value
    return _auto_theta_form(u, C, S, gb, sub.fam.beta)


def optimize_theta_growth(
    u: float,
    spec: GrowthSpec,
    c_value: float,
    s_value: float,
    n_grid: int = 512,
    theta_tol: float = 1e-10,
    k_probe: int = 512,
) -> tuple[float, float]:
    """Minimize the growth tail bound over theta for precomputed (C, S).

    Same concave-argument search as the bounded-domain optimizer: maximize
    arg(theta) = u*(1-theta) - 2*S*theta^(-1/(gamma*beta)).
    """
    gb = spec.gamma_beta
    beta = spec.fam.beta
    cap = min(1.0, theta_sup(spec, k_probe)) * (1.0 - 1e-12)

    def arg(t: float) -> float:
        return u * (1.0 - t) - 2.0 * s_value * t ** (-1.0 / gb)

    grid = np.geomspace(min(1e-8, cap * 1e-3), cap, n_grid)
    vals = np.array([arg(float(t)) for t in grid])
    k = int(np.argmax(vals))
    a = grid[k - 1] if k > 0 else grid[0] * 0.5
    b = grid[k + 1] if k < n_grid - 1 else cap
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = arg(c), arg(d)
    while b - a > theta_tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = arg(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = arg(d)
    theta_star = 0.5 * (a + b)
    best = max([(arg(theta_star), theta_star)] + [(float(v), float(t)) for v, t in zip(vals, grid)])
    a_star, theta_star = best
    if a_star <= 0.0:
        raise ValueError(f"no valid theta: u = {u} is below every validity threshold")
    bound = min(1.0, 2.0 * math.exp(-(a_star ** beta) / (beta * c_value ** beta)))
    return theta_star, bound
