"""Closed forms for the two-user Gaussian MAC ``Y = X1 + X2 + N``.

Powers and noise are variances. Rates are in bits per channel use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import bisect

from .exceptions import DegenerateRho, MacjscError
from .region import RegionReport, RegionRow

RHO_XTOL = 1e-6


@dataclass(frozen=True)
class GmacParams:
    """Channel parameters; ``rho`` is the correlation of ``(X1, X2)``."""

    P1: float
    P2: float
    sigmaN2: float = 1.0
    rho: float = 0.0

    def __post_init__(self):
        if not (self.P1 > 0 and self.P2 > 0 and self.sigmaN2 > 0):
            raise MacjscError("powers and noise variance must be positive")
        if not abs(self.rho) <= 1:
            raise MacjscError(f"|rho| must be at most 1, got {self.rho}")

    def with_rho(self, rho: float) -> GmacParams:
        return replace(self, rho=float(rho))


@dataclass(frozen=True)
class GaussianSourceParams:
    """Zero-mean jointly Gaussian sources quantized at rates ``R1``, ``R2``."""

    sigma1_2: float
    sigma2_2: float
    rho_source: float
    R1: float = 0.0
    R2: float = 0.0

    def __post_init__(self):
        if not (self.sigma1_2 > 0 and self.sigma2_2 > 0):
            raise MacjscError("source variances must be positive")
        if not abs(self.rho_source) <= 1:
            raise MacjscError("|rho_source| must be at most 1")
        if self.R1 < 0 or self.R2 < 0:
            raise MacjscError("rates must be nonnegative")


def gmac_outer_bounds(p: GmacParams) -> tuple[float, float, float]:
    """Gaussian-input values of ``I(X1;Y|X2)``, ``I(X2;Y|X1)``, ``I(X1,X2;Y)``.

    These upper-bound the corresponding mutual informations for any input
    pair with the same powers and correlation.
    """
    r2 = p.rho**2
    i1 = 0.5 * math.log2(1 + p.P1 * (1 - r2) / p.sigmaN2)
    i2 = 0.5 * math.log2(1 + p.P2 * (1 - r2) / p.sigmaN2)
    isum = 0.5 * math.log2(1 + (p.P1 + p.P2 + 2 * p.rho * math.sqrt(p.P1 * p.P2)) / p.sigmaN2)
    return i1, i2, isum


def lemma3_rho_bound(mi_bits: float) -> float:
    """Largest input correlation reachable from sources sharing ``mi_bits``.

    If ``X1 - U1 - U2 - X2`` is a Markov chain then
    ``rho(X1, X2)^2 <= 1 - 2^(-2 I(U1;U2))``.
    """
    if mi_bits < 0:
        raise MacjscError("mutual information must be nonnegative")
    return math.sqrt(1.0 - 2.0 ** (-2.0 * mi_bits))


@dataclass(frozen=True)
class RhoInterval:
    """Input correlations for which the relaxed bounds all hold.

    ``sum_threshold`` is where the sum bound meets the joint entropy,
    ``cap1``/``cap2`` where the individual bounds meet the conditional
    entropies and ``source_bound`` the correlation bound from the source.
    ``lo``/``hi`` are ``None`` when the interval is empty.
    """

    lo: float | None
    hi: float | None
    sum_threshold: float
    cap1: float
    cap2: float
    source_bound: float

    @property
    def feasible(self) -> bool:
        return self.lo is not None

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "rho_min": self.lo,
            "rho_max": self.hi,
            "sum_threshold": self.sum_threshold,
            "cap1": self.cap1,
            "cap2": self.cap2,
            "source_bound": self.source_bound,
        }


def rho_feasibility_interval(p: GmacParams, H1: float, H2: float, Hsum: float, mi: float) -> RhoInterval:
    """Solve the relaxed sufficient conditions for the input correlation.

    Finds ``rho`` in ``[0, 1]`` such that ``H(U1|U2) < I1(rho)``,
    ``H(U2|U1) < I2(rho)``, ``H(U1,U2) < Isum(rho)`` and ``rho`` does not
    exceed :func:`lemma3_rho_bound` of ``mi``. Thresholds come from bisection
    to ``1e-6``; the individual bounds decrease and the sum bound increases
    in ``rho``.
    """
    if H1 > Hsum + 1e-12 or H2 > Hsum + 1e-12:
        raise MacjscError("conditional entropies cannot exceed the joint entropy")

    def bound(k):
        return lambda r: gmac_outer_bounds(p.with_rho(r))[k]

    i1_0, i2_0, is_0 = gmac_outer_bounds(p.with_rho(0.0))
    is_1 = gmac_outer_bounds(p.with_rho(1.0))[2]

    if is_0 > Hsum:
        s = 0.0
    elif is_1 <= Hsum:
        s = math.inf
    else:
        s = bisect(lambda r: bound(2)(r) - Hsum, 0.0, 1.0, xtol=RHO_XTOL / 4)

    def cap(k, H, i0):
        if i0 <= H:
            return -math.inf
        # bound is 0 at rho = 1, so H > 0 gives a sign change
        if H <= 0:
            return 1.0
        return bisect(lambda r: bound(k)(r) - H, 0.0, 1.0, xtol=RHO_XTOL / 4)

    c1 = cap(0, H1, i1_0)
    c2 = cap(1, H2, i2_0)
    l3 = lemma3_rho_bound(mi)
    lo, hi = s, min(c1, c2, l3)
    if not lo < hi:
        return RhoInterval(None, None, s, c1, c2, l3)
    return RhoInterval(lo, hi, s, c1, c2, l3)


def lt_rate_region(p: GmacParams) -> tuple[float, float, float]:
    """Rates at which correlated Gaussian auxiliaries can be sent.

    Returns ``(0.5 log2(P1/s + 1/(1-r^2)), 0.5 log2(P2/s + 1/(1-r^2)),
    0.5 log2((s + P1 + P2 + 2 r sqrt(P1 P2)) / ((1-r^2) s)))``.
    """
    if abs(p.rho) >= 1:
        raise DegenerateRho("input correlation of magnitude 1 leaves no private rate")
    q = 1 - p.rho**2
    s = p.sigmaN2
    r1 = 0.5 * math.log2(p.P1 / s + 1 / q)
    r2 = 0.5 * math.log2(p.P2 / s + 1 / q)
    rs = 0.5 * math.log2((s + p.P1 + p.P2 + 2 * p.rho * math.sqrt(p.P1 * p.P2)) / (q * s))
    return r1, r2, rs


def lt_induced_rho(g: GaussianSourceParams) -> float:
    """Correlation of ``W_i = U_i + Q_i`` with ``I(U_i;W_i) = R_i``."""
    a1 = 1 - 2.0 ** (-2 * g.R1)
    a2 = 1 - 2.0 ** (-2 * g.R2)
    return g.rho_source * math.sqrt(a1 * a2)


def lt_distortions(g: GaussianSourceParams, rho_tilde: float) -> tuple[float, float]:
    """Mean-square errors ``var(U_i | W1, W2)`` of the quantize-and-forward scheme.

    ``D1 = s1 2^(-2 R1) (1 - rho^2 (1 - 2^(-2 R2))) / (1 - rho_tilde^2)`` and
    symmetrically for ``D2``.
    """
    if abs(rho_tilde) >= 1:
        raise DegenerateRho("rho_tilde of magnitude 1 makes the distortion undefined")
    q = 1 - rho_tilde**2
    r2 = g.rho_source**2
    d1 = g.sigma1_2 * 2.0 ** (-2 * g.R1) * (1 - r2 * (1 - 2.0 ** (-2 * g.R2))) / q
    d2 = g.sigma2_2 * 2.0 ** (-2 * g.R2) * (1 - r2 * (1 - 2.0 ** (-2 * g.R1))) / q
    return d1, d2


def quantizer_covariance(g: GaussianSourceParams) -> np.ndarray:
    """Covariance of ``(U1, U2, W1, W2)`` with ``W_i = U_i + Q_i``.

    Requires ``R1, R2 > 0`` (a zero rate means infinite quantization noise).
    """
    if g.R1 <= 0 or g.R2 <= 0:
        raise MacjscError("quantizer covariance needs positive rates")
    s1, s2 = g.sigma1_2, g.sigma2_2
    c = g.rho_source * math.sqrt(s1 * s2)
    q1 = s1 / (2.0 ** (2 * g.R1) - 1)
    q2 = s2 / (2.0 ** (2 * g.R2) - 1)
    K = np.array(
        [
            [s1, c, s1, c],
            [c, s2, c, s2],
            [s1, c, s1 + q1, c],
            [c, s2, c, s2 + q2],
        ]
    )
    return K


def gaussian_source_conditions(g: GaussianSourceParams, p: GmacParams) -> RegionReport:
    """Relaxed sufficient conditions for Gaussian sources over the GMAC.

    Left sides are ``I(U1;W1|W2)``, ``I(U2;W2|W1)`` and ``I(U1,U2;W1,W2)``
    for ``W_i = U_i + Q_i`` with ``I(U_i;W_i) = R_i``; with
    ``a_i = 1 - 2^(-2 R_i)`` they equal ``R1 + 0.5 log2(1 - rho^2 a1 a2)``,
    the symmetric term, and ``R1 + R2 + 0.5 log2(1 - rho^2 a1 a2)``. Right
    sides are :func:`gmac_outer_bounds` at ``p.rho``.
    """
    a1 = 1 - 2.0 ** (-2 * g.R1)
    a2 = 1 - 2.0 ** (-2 * g.R2)
    shared = 0.5 * math.log2(1 - g.rho_source**2 * a1 * a2) if g.rho_source**2 * a1 * a2 < 1 else -math.inf
    i1, i2, isum = gmac_outer_bounds(p)
    rows = [
        RegionRow("I(U1;W1|W2) < I(X1;Y|X2)", g.R1 + shared, i1),
        RegionRow("I(U2;W2|W1) < I(X2;Y|X1)", g.R2 + shared, i2),
        RegionRow("I(U1,U2;W1,W2) < I(X1,X2;Y)", g.R1 + g.R2 + shared, isum),
    ]
    return RegionReport(rows, title="Gaussian sources over the Gaussian MAC")


def sweep_rho(p: GmacParams, rhos) -> list[dict]:
    """Outer bounds and scheme rates on a grid of input correlations."""
    out = []
    for r in rhos:
        q = p.with_rho(float(r))
        i1, i2, isum = gmac_outer_bounds(q)
        row = {"rho": float(r), "I1": i1, "I2": i2, "Isum": isum}
        if abs(r) < 1:
            row.update(dict(zip(("R1_max", "R2_max", "Rsum_max"), lt_rate_region(q))))
        out.append(row)
    return out
