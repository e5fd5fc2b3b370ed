"""Map discrete source symbols to correlated Gaussian-mixture channel inputs.

Each symbol ``u`` of source ``i`` gets a one-dimensional Gaussian mixture
``f(x_i | u)``. Drawing the two users' inputs independently given the
symbols yields the joint density

    g(x1, x2) = sum_{u1, u2} p(u1, u2) f(x1 | u1) f(x2 | u2).

:func:`fit_mixture` picks the mixtures so that ``g`` is close in L2 to a
zero-mean, unit-variance bivariate Gaussian with correlation ``rho``, while
each marginal keeps zero mean and unit variance.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.optimize import minimize
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import (
    DegenerateRho,
    MacjscError,
    NotNormalized,
    OptimizerDiverged,
    ShapeMismatch,
    SymbolNotCovered,
    ZeroVarianceComponent,
)
from .pmf import JointPmf, make_joint

VAR_FLOOR = 1e-6
CONSTRAINT_TOL = 1e-6


@dataclass(frozen=True)
class SymbolMixture:
    """Gaussian mixture attached to one source symbol."""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        a = np.atleast_1d(np.asarray(self.means, dtype=float))
        c = np.atleast_1d(np.asarray(self.variances, dtype=float))
        if not (w.shape == a.shape == c.shape) or w.ndim != 1 or w.size == 0:
            raise ShapeMismatch("weights, means and variances need the same nonzero length")
        if (w < 0).any() or abs(w.sum() - 1) > 1e-9:
            raise NotNormalized(f"mixture weights must be nonnegative and sum to 1, got {w.sum()}")
        if (c < 0).any():
            raise MacjscError("component variances must be nonnegative")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", a)
        object.__setattr__(self, "variances", c)

    @property
    def n_components(self) -> int:
        return self.weights.size

    def mean(self) -> float:
        return float(self.weights @ self.means)

    def second_moment(self) -> float:
        return float(self.weights @ (self.variances + self.means**2))

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)[..., None]
        if (self.variances == 0).any():
            raise ZeroVarianceComponent("a point-mass component has no density")
        c = self.variances
        return (self.weights * np.exp(-0.5 * (x - self.means) ** 2 / c) / np.sqrt(2 * np.pi * c)).sum(-1)

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
        }


@dataclass(frozen=True)
class MixtureSpec:
    """Per-symbol mixtures for both sources.

    ``source1[u]`` is the mixture used when the first source emits ``u``.
    """

    source1: tuple[SymbolMixture, ...]
    source2: tuple[SymbolMixture, ...]

    def __post_init__(self):
        object.__setattr__(self, "source1", tuple(self.source1))
        object.__setattr__(self, "source2", tuple(self.source2))

    @classmethod
    def standard(cls, n1: int = 2, n2: int = 2, r: int = 1) -> MixtureSpec:
        """Every symbol maps to ``r`` identical standard-normal components."""

        def one():
            return SymbolMixture(np.full(r, 1 / r), np.zeros(r), np.ones(r))

        return cls(tuple(one() for _ in range(n1)), tuple(one() for _ in range(n2)))

    def mixtures(self, source: int) -> tuple[SymbolMixture, ...]:
        if source not in (1, 2):
            raise MacjscError(f"source index must be 1 or 2, got {source}")
        return self.source1 if source == 1 else self.source2

    def symbol(self, source: int, u: int) -> SymbolMixture:
        mix = self.mixtures(source)
        if not 0 <= u < len(mix):
            raise SymbolNotCovered(f"source {source} has no mixture for symbol {u}")
        return mix[u]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(m.n_components for m in self.source1 + self.source2)

    def scaled(self, P1: float, P2: float) -> MixtureSpec:
        """Scale user ``i`` by ``sqrt(P_i)``; correlation is unchanged."""

        def sc(m, P):
            return SymbolMixture(m.weights, m.means * math.sqrt(P), m.variances * P)

        return MixtureSpec(tuple(sc(m, P1) for m in self.source1), tuple(sc(m, P2) for m in self.source2))

    def check_covers(self, pmf: JointPmf) -> None:
        n1, n2 = pmf.sizes[:2]
        if len(self.source1) < n1 or len(self.source2) < n2:
            raise SymbolNotCovered(
                f"spec covers {len(self.source1)}x{len(self.source2)} symbols, source needs {n1}x{n2}"
            )

    def padded(self) -> tuple[np.ndarray, ...]:
        """``(w1, a1, c1, w2, a2, c2)`` arrays padded with zero-weight components."""
        r = max(self.counts)

        def pad(mix):
            w = np.zeros((len(mix), r))
            a = np.zeros((len(mix), r))
            c = np.ones((len(mix), r))
            for s, m in enumerate(mix):
                k = m.n_components
                w[s, :k], a[s, :k], c[s, :k] = m.weights, m.means, m.variances
            return w, a, c

        return pad(self.source1) + pad(self.source2)

    def to_dict(self) -> dict:
        return {
            "source1": [m.to_dict() for m in self.source1],
            "source2": [m.to_dict() for m in self.source2],
        }

    @classmethod
    def from_dict(cls, d: dict) -> MixtureSpec:
        def load(lst):
            return tuple(SymbolMixture(m["weights"], m["means"], m["variances"]) for m in lst)

        return cls(load(d["source1"]), load(d["source2"]))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, s: str) -> MixtureSpec:
        return cls.from_dict(json.loads(s))


@dataclass
class FitResult:
    """Outcome of :func:`fit_mixture`.

    ``start_objectives`` holds the final objective of every start in start
    order; ``best_start`` indexes the winner.
    """

    spec: MixtureSpec
    objective: float
    normalized_distortion: float
    constraint_residuals: np.ndarray
    induced_rho: float
    rho_target: float = 0.0
    start_objectives: list[float] = field(default_factory=list)
    best_start: int = 0

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "objective": self.objective,
            "normalized_distortion": self.normalized_distortion,
            "constraint_residuals": np.asarray(self.constraint_residuals).tolist(),
            "induced_rho": self.induced_rho,
            "rho_target": self.rho_target,
            "start_objectives": list(self.start_objectives),
            "best_start": self.best_start,
        }

    @classmethod
    def from_dict(cls, d: dict) -> FitResult:
        return cls(
            spec=MixtureSpec.from_dict(d["spec"]),
            objective=d["objective"],
            normalized_distortion=d["normalized_distortion"],
            constraint_residuals=np.asarray(d["constraint_residuals"]),
            induced_rho=d["induced_rho"],
            rho_target=d.get("rho_target", 0.0),
            start_objectives=list(d.get("start_objectives", [])),
            best_start=d.get("best_start", 0),
        )


# -- densities and moments ----------------------------------------------------------


def _pair_table(pmf: JointPmf) -> np.ndarray:
    if len(pmf.names) != 2:
        raise ShapeMismatch(f"expected a pmf over two sources, got {pmf.names}")
    return pmf.probs


def induced_density(spec: MixtureSpec, pmf: JointPmf, x1, x2) -> np.ndarray:
    """Evaluate ``g(x1, x2) = sum p(u1, u2) f(x1|u1) f(x2|u2)`` pointwise."""
    spec.check_covers(pmf)
    P = _pair_table(pmf)
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    f1 = np.stack([spec.source1[u].pdf(x1) for u in range(P.shape[0])], axis=-1)
    f2 = np.stack([spec.source2[u].pdf(x2) for u in range(P.shape[1])], axis=-1)
    return np.einsum("...a,ab,...b->...", f1, P, f2)


def target_norm2(rho: float) -> float:
    """``int f_rho^2`` for the standard bivariate normal with correlation ``rho``."""
    return 1.0 / (4 * math.pi * math.sqrt(1 - rho**2))


@numba.njit(cache=True)
def _l2(w1, a1, c1, w2, a2, c2, P, rho):
    """Closed-form ``int (g - f_rho)^2`` using Gaussian product integrals."""
    n1, r = w1.shape
    n2 = w2.shape[0]
    two_pi = 2.0 * math.pi
    G1 = np.zeros((n1, n1))
    for s in range(n1):
        for t in range(n1):
            acc = 0.0
            for i in range(r):
                for j in range(r):
                    v = c1[s, i] + c1[t, j]
                    d = a1[s, i] - a1[t, j]
                    acc += w1[s, i] * w1[t, j] * math.exp(-0.5 * d * d / v) / math.sqrt(two_pi * v)
            G1[s, t] = acc
    G2 = np.zeros((n2, n2))
    for s in range(n2):
        for t in range(n2):
            acc = 0.0
            for i in range(r):
                for j in range(r):
                    v = c2[s, i] + c2[t, j]
                    d = a2[s, i] - a2[t, j]
                    acc += w2[s, i] * w2[t, j] * math.exp(-0.5 * d * d / v) / math.sqrt(two_pi * v)
            G2[s, t] = acc
    gg = 0.0
    for a in range(n1):
        for b in range(n2):
            if P[a, b] == 0.0:
                continue
            for c in range(n1):
                for d in range(n2):
                    gg += P[a, b] * P[c, d] * G1[a, c] * G2[b, d]
    gf = 0.0
    for s in range(n1):
        for t in range(n2):
            if P[s, t] == 0.0:
                continue
            acc = 0.0
            for i in range(r):
                for j in range(r):
                    s11 = 1.0 + c1[s, i]
                    s22 = 1.0 + c2[t, j]
                    det = s11 * s22 - rho * rho
                    x = a1[s, i]
                    y = a2[t, j]
                    q = (s22 * x * x - 2.0 * rho * x * y + s11 * y * y) / det
                    acc += w1[s, i] * w2[t, j] * math.exp(-0.5 * q) / (two_pi * math.sqrt(det))
            gf += P[s, t] * acc
    ff = 1.0 / (4.0 * math.pi * math.sqrt(1.0 - rho * rho))
    return gg - 2.0 * gf + ff


def l2_objective(spec: MixtureSpec, pmf: JointPmf, rho_target: float) -> tuple[float, float]:
    """``(int (g - f_rho)^2, int (g - f_rho)^2 / int f_rho^2)`` in closed form.

    Per axis, ``int N(x; a, c) N(x; a', c') dx = N(a - a'; 0, c + c')``; the
    cross term with the correlated target is a bivariate normal density
    evaluated at the component means with covariance ``K + diag(c1, c2)``.
    """
    if not abs(rho_target) < 1:
        raise DegenerateRho("target correlation must satisfy |rho| < 1")
    spec.check_covers(pmf)
    P = _pair_table(pmf)
    w1, a1, c1, w2, a2, c2 = spec.padded()
    w1, a1, c1 = w1[: P.shape[0]], a1[: P.shape[0]], c1[: P.shape[0]]
    w2, a2, c2 = w2[: P.shape[1]], a2[: P.shape[1]], c2[: P.shape[1]]
    # a pair of point masses on one axis makes the product integral infinite
    for w, c, p in ((w1, c1, P.sum(1)), (w2, c2, P.sum(0))):
        live = (w > 0) & (p[:, None] > 0)
        if (c[live] == 0).any():
            raise ZeroVarianceComponent("zero-variance component makes the L2 objective unbounded")
    obj = float(_l2(w1, a1, c1, w2, a2, c2, P, float(rho_target)))
    return obj, obj / target_norm2(rho_target)


def constraint_residuals(spec: MixtureSpec, pmf: JointPmf) -> np.ndarray:
    """Residuals ``[E X1, E X2, E X1^2 - 1, E X2^2 - 1, weight sums - 1...]``."""
    spec.check_covers(pmf)
    P = _pair_table(pmf)
    p1, p2 = P.sum(1), P.sum(0)
    res = [
        sum(p1[u] * spec.source1[u].mean() for u in range(len(p1))),
        sum(p2[u] * spec.source2[u].mean() for u in range(len(p2))),
        sum(p1[u] * spec.source1[u].second_moment() for u in range(len(p1))) - 1,
        sum(p2[u] * spec.source2[u].second_moment() for u in range(len(p2))) - 1,
    ]
    res += [m.weights.sum() - 1 for m in spec.source1 + spec.source2]
    return np.asarray(res, dtype=float)


def induced_rho(spec: MixtureSpec, pmf: JointPmf) -> float:
    """Correlation coefficient of ``(X1, X2)`` under ``g``."""
    spec.check_covers(pmf)
    P = _pair_table(pmf)
    m1 = np.array([spec.source1[u].mean() for u in range(P.shape[0])])
    m2 = np.array([spec.source2[u].mean() for u in range(P.shape[1])])
    p1, p2 = P.sum(1), P.sum(0)
    e1, e2 = p1 @ m1, p2 @ m2
    v1 = sum(p1[u] * spec.source1[u].second_moment() for u in range(len(p1))) - e1**2
    v2 = sum(p2[u] * spec.source2[u].second_moment() for u in range(len(p2))) - e2**2
    cov = m1 @ P @ m2 - e1 * e2
    if v1 <= 0 or v2 <= 0:
        return 0.0
    return float(cov / math.sqrt(v1 * v2))


def standardize(spec: MixtureSpec, pmf: JointPmf) -> MixtureSpec:
    """Affinely rescale each user so its marginal has mean 0 and variance 1."""
    P = _pair_table(pmf)

    def fix(mix, p):
        m = sum(p[u] * mix[u].mean() for u in range(len(p)))
        v = sum(p[u] * mix[u].second_moment() for u in range(len(p))) - m**2
        if v <= 0:
            raise ZeroVarianceComponent("marginal has zero variance; cannot standardize")
        s = math.sqrt(v)
        return tuple(SymbolMixture(x.weights, (x.means - m) / s, x.variances / v) for x in mix)

    return MixtureSpec(fix(spec.source1, P.sum(1)), fix(spec.source2, P.sum(0)))


# -- fitting --------------------------------------------------------------------------


def _layout(counts, n1, n2):
    counts = tuple(int(k) for k in counts)
    if len(counts) == 1:
        counts = counts * (n1 + n2)
    if len(counts) != n1 + n2:
        raise ShapeMismatch(f"need one component count per symbol ({n1 + n2}), got {len(counts)}")
    if min(counts) < 1:
        raise MacjscError("component counts must be at least 1")
    return counts


def _unpack(theta, counts, n1, r):
    """Parameter vector to padded ``(w, a, c)`` arrays of shape ``(n1 + n2, r)``.

    ``theta`` stacks, per active component, a nonnegative weight (taken as
    ``|.|`` and normalized per symbol), a mean and a variance clamped below at
    ``VAR_FLOOR``.
    """
    S = len(counts)
    w = np.zeros((S, r))
    a = np.zeros((S, r))
    c = np.ones((S, r))
    k = 0
    for s, m in enumerate(counts):
        raw = np.abs(theta[k : k + m])
        tot = raw.sum()
        w[s, :m] = raw / tot if tot > 0 else 1.0 / m
        a[s, :m] = theta[k + m : k + 2 * m]
        c[s, :m] = np.maximum(theta[k + 2 * m : k + 3 * m], VAR_FLOOR)
        k += 3 * m
    return w, a, c


@numba.njit(cache=True)
def _unpack_nb(theta, counts, r):
    S = counts.size
    w = np.zeros((S, r))
    a = np.zeros((S, r))
    c = np.ones((S, r))
    k = 0
    for s in range(S):
        m = counts[s]
        tot = 0.0
        for i in range(m):
            tot += abs(theta[k + i])
        for i in range(m):
            w[s, i] = abs(theta[k + i]) / tot if tot > 0 else 1.0 / m
            a[s, i] = theta[k + m + i]
            c[s, i] = max(theta[k + 2 * m + i], VAR_FLOOR)
        k += 3 * m
    return w, a, c


@numba.njit(cache=True)
def _penalized(theta, counts, n1, r, P, p1, p2, rho, ff, mu):
    """Normalized L2 objective plus ``mu`` times the squared moment residuals."""
    w, a, c = _unpack_nb(theta, counts, r)
    obj = _l2(w[:n1], a[:n1], c[:n1], w[n1:], a[n1:], c[n1:], P, rho) / ff
    pen = 0.0
    for block, p in ((0, p1), (1, p2)):
        lo = 0 if block == 0 else n1
        m = 0.0
        s2 = 0.0
        for u in range(p.size):
            for i in range(r):
                m += p[u] * w[lo + u, i] * a[lo + u, i]
                s2 += p[u] * w[lo + u, i] * (c[lo + u, i] + a[lo + u, i] ** 2)
        pen += m * m + (s2 - 1.0) ** 2
    return obj + mu * pen


def _to_spec(w, a, c, counts, n1) -> MixtureSpec:
    mix = [SymbolMixture(w[s, :m], a[s, :m], c[s, :m]) for s, m in enumerate(counts)]
    return MixtureSpec(tuple(mix[:n1]), tuple(mix[n1:]))


def _initial_theta(counts, rng, scale):
    parts = []
    for m in counts:
        parts += [np.ones(m), np.zeros(m), np.ones(m)]
    theta = np.concatenate(parts)
    return theta + rng.normal(0.0, scale, theta.size)


def fit_mixture(
    pmf: JointPmf,
    rho_target: float,
    counts=(2,),
    n_starts: int = 16,
    seed: int = 0,
    rounds: int = 5,
    penalty0: float = 10.0,
    penalty_growth: float = 10.0,
    maxfev: int = 20000,
    perturbation: float = 0.3,
) -> FitResult:
    """Fit per-symbol mixtures so that ``g`` approximates the correlated Gaussian.

    Minimizes the normalized L2 distance subject to zero mean and unit
    variance of each marginal. Moment constraints enter as a quadratic
    penalty whose weight starts at ``penalty0`` and grows by
    ``penalty_growth`` over ``rounds`` rounds; each round runs a Nelder-Mead
    search. Start ``k`` perturbs the all-standard-normal spec with
    ``N(0, perturbation^2)`` noise drawn from seed ``seed + k``.

    The winning start is finally rescaled per user so that the moment
    constraints hold to rounding error, then re-scored without the
    variance clamp.

    Parameters
    ----------
    pmf : JointPmf
        Source distribution over two variables.
    rho_target : float
        Target correlation, ``|rho_target| < 1``.
    counts : sequence of int
        Components per symbol, source 1 symbols first. A single value is
        used for every symbol.

    Returns
    -------
    FitResult
    """
    if not abs(rho_target) < 1:
        raise DegenerateRho("target correlation must satisfy |rho| < 1")
    P = np.ascontiguousarray(_pair_table(pmf), dtype=float)
    n1, n2 = P.shape
    counts = _layout(counts, n1, n2)
    r = max(counts)
    p1, p2 = P.sum(1), P.sum(0)
    ff = target_norm2(rho_target)

    cnt = np.asarray(counts, dtype=np.int64)

    finals = []
    best = None
    for k in range(n_starts):
        rng = np.random.default_rng(seed + k)
        theta = _initial_theta(counts, rng, perturbation)
        mu = penalty0
        for _ in range(rounds):
            res = minimize(
                _penalized,
                theta,
                args=(cnt, n1, r, P, p1, p2, float(rho_target), ff, mu),
                method="Nelder-Mead",
                options={"maxfev": maxfev, "maxiter": maxfev, "xatol": 1e-9, "fatol": 1e-14, "adaptive": True},
            )
            theta = res.x
            mu *= penalty_growth
        w, a, c = _unpack(theta, counts, n1, r)
        try:
            spec = standardize(_to_spec(w, a, c, counts, n1), pmf)
            obj, norm = l2_objective(spec, pmf, rho_target)
        except ZeroVarianceComponent:
            obj = norm = math.inf
        if not math.isfinite(obj):
            finals.append(math.inf)
            continue
        finals.append(norm)
        # strict comparison keeps the lowest start index on ties
        if best is None or norm < best[1]:
            best = (obj, norm, spec, k)
    if best is None:
        raise OptimizerDiverged(f"no start out of {n_starts} reached a finite feasible objective")
    obj, norm, spec, k = best
    residuals = constraint_residuals(spec, pmf)
    if np.abs(residuals).max() > CONSTRAINT_TOL:
        raise OptimizerDiverged(f"constraint residual {np.abs(residuals).max():.3g} after projection")
    return FitResult(
        spec=spec,
        objective=obj,
        normalized_distortion=norm,
        constraint_residuals=residuals,
        induced_rho=induced_rho(spec, pmf),
        rho_target=float(rho_target),
        start_objectives=finals,
        best_start=k,
    )


# -- sampling -------------------------------------------------------------------------


def sample_codeword(spec: MixtureSpec, source: int, symbol, rng=None, size=None):
    """Draw channel inputs for ``symbol`` from its mixture.

    A component is picked by weight, then a value from ``N(mean, variance)``.
    ``symbol`` may be an integer array, in which case one draw is made per
    entry and ``size`` is ignored.
    """
    rng = np.random.default_rng(rng)
    mix = spec.mixtures(source)
    sym = np.asarray(symbol)
    if sym.ndim == 0 and size is None:
        m = spec.symbol(source, int(sym))
        i = rng.choice(m.n_components, p=m.weights)
        return float(m.means[i] + math.sqrt(m.variances[i]) * rng.standard_normal())
    if sym.ndim == 0:
        sym = np.full(size, int(sym))
    if sym.size and (sym.min() < 0 or sym.max() >= len(mix)):
        raise SymbolNotCovered(f"source {source} has mixtures for {len(mix)} symbols")
    out = np.empty(sym.shape)
    flat = sym.ravel()
    res = out.ravel()
    for u in np.unique(flat):
        idx = np.flatnonzero(flat == u)
        m = mix[u]
        comp = rng.choice(m.n_components, size=idx.size, p=m.weights)
        res[idx] = m.means[comp] + np.sqrt(m.variances[comp]) * rng.standard_normal(idx.size)
    return res.reshape(sym.shape)


# -- estimator ------------------------------------------------------------------------


def _empirical_pmf(X, n1=None, n2=None) -> JointPmf:
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != 2:
        raise ShapeMismatch("expected an array of symbol pairs with shape (n_samples, 2)")
    X = X.astype(int)
    if (X < 0).any():
        raise MacjscError("symbols must be nonnegative integers")
    n1 = n1 or int(X[:, 0].max()) + 1
    n2 = n2 or int(X[:, 1].max()) + 1
    table = np.zeros((n1, n2))
    np.add.at(table, (X[:, 0], X[:, 1]), 1.0)
    return make_joint([("U1", n1), ("U2", n2)], table / table.sum())


class CorrelatedGaussianMapper(TransformerMixin, BaseEstimator):
    """Map pairs of discrete symbols to correlated real channel inputs.

    ``fit`` learns per-symbol Gaussian mixtures from observed symbol pairs
    (or directly from a known pmf); ``transform`` draws one pair of channel
    inputs per row.

    Parameters
    ----------
    rho : float
        Target correlation of the channel inputs.
    n_components : int or sequence of int
        Components per symbol.
    n_starts : int
        Number of randomized optimizer starts.
    powers : tuple of float
        Output powers ``(P1, P2)``; inputs are scaled by ``sqrt(P_i)``.
    random_state : int or None
        Seed for both fitting and sampling.
    maxfev : int
        Function evaluation cap per optimizer round.

    Attributes
    ----------
    result_ : FitResult
    spec_ : MixtureSpec
        Fitted spec, already scaled to ``powers``.
    source_pmf_ : JointPmf
    """

    def __init__(self, rho=0.3, n_components=2, n_starts=16, powers=(1.0, 1.0), random_state=0, maxfev=20000):
        self.rho = rho
        self.n_components = n_components
        self.n_starts = n_starts
        self.powers = powers
        self.random_state = random_state
        self.maxfev = maxfev

    def fit(self, X=None, y=None, source_pmf: JointPmf | None = None):
        if source_pmf is None:
            if X is None:
                raise MacjscError("fit needs symbol pairs or source_pmf")
            source_pmf = _empirical_pmf(X)
        counts = (self.n_components,) if np.isscalar(self.n_components) else tuple(self.n_components)
        seed = 0 if self.random_state is None else int(self.random_state)
        self.result_ = fit_mixture(
            source_pmf, self.rho, counts, n_starts=self.n_starts, seed=seed, maxfev=self.maxfev
        )
        self.source_pmf_ = source_pmf
        self.spec_ = self.result_.spec.scaled(*self.powers)
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        X = np.asarray(X).astype(int)
        if X.ndim != 2 or X.shape[1] != 2:
            raise ShapeMismatch("expected an array of symbol pairs with shape (n_samples, 2)")
        rng = np.random.default_rng(self.random_state)
        x1 = sample_codeword(self.spec_, 1, X[:, 0], rng)
        x2 = sample_codeword(self.spec_, 2, X[:, 1], rng)
        return np.column_stack([x1, x2])

    def score(self, X=None, y=None) -> float:
        """Negative normalized L2 distortion of the fit."""
        check_is_fitted(self, "result_")
        return -self.result_.normalized_distortion
