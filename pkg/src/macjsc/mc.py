"""Monte Carlo mutual information for mixture inputs over the Gaussian MAC.

Every conditional law of ``Y = X1 + X2 + N`` given the conditioning
variables is a finite Gaussian mixture, so each differential entropy is
estimated by averaging ``-log2`` of the exact density at sampled points.
The only error is sampling error, reported as a batch-means standard error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp
from scipy.stats import multivariate_normal

from .exceptions import MacjscError, ZeroVarianceComponent
from .gmac import GmacParams, gmac_outer_bounds
from .mixture import MixtureSpec, sample_codeword
from .pmf import JointPmf

LN2 = math.log(2.0)

TARGETS = {
    "I1": "I(X1;Y|X2)",
    "I2": "I(X2;Y|X1)",
    "Isum": "I(X1,X2;Y)",
    "I1c": "I(X1;Y|X2,U2)",
    "I2c": "I(X2;Y|X1,U1)",
}


@dataclass(frozen=True)
class McConfig:
    """Sampling setup. ``powers`` scales user ``i`` by ``sqrt(P_i)``."""

    n: int = 1_000_000
    seed: int = 0
    sigmaN2: float = 1.0
    powers: tuple[float, float] = (1.0, 1.0)
    batch: int = 10_000

    def __post_init__(self):
        if self.n < 1 or self.batch < 1:
            raise MacjscError("sample count and batch size must be positive")
        if not self.sigmaN2 > 0:
            raise MacjscError("noise variance must be positive")


@dataclass(frozen=True)
class MiEstimate:
    value: float
    stderr: float
    n: int

    def to_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "n": self.n}


@dataclass(frozen=True)
class GaussianInputs:
    """Jointly Gaussian channel inputs with powers ``P1, P2`` and correlation ``rho``."""

    P1: float
    P2: float
    rho: float

    def covariance(self) -> np.ndarray:
        c = self.rho * math.sqrt(self.P1 * self.P2)
        return np.array([[self.P1, c], [c, self.P2]])


def _target(name: str) -> str:
    for k, v in TARGETS.items():
        if name in (k, v):
            return k
    raise MacjscError(f"unknown target {name!r}; choose from {sorted(TARGETS)}")


def _noise_entropy(s2: float) -> float:
    return 0.5 * math.log2(2 * math.pi * math.e * s2)


def _summarize(batch_means: list[float], batch_sizes: list[int]) -> tuple[float, float]:
    m = np.asarray(batch_means)
    w = np.asarray(batch_sizes, dtype=float)
    mean = float((m * w).sum() / w.sum())
    if m.size < 2:
        return mean, 0.0
    return mean, float(m.std(ddof=1) / math.sqrt(m.size))


def _batches(n: int, batch: int) -> list[int]:
    full, rest = divmod(n, batch)
    return [batch] * full + ([rest] if rest else [])


# -- mixture log densities ------------------------------------------------------------


class _Model:
    """Padded per-symbol mixtures for both users after power scaling."""

    def __init__(self, spec: MixtureSpec, pmf: JointPmf, powers):
        spec.check_covers(pmf)
        self.P = pmf.probs
        self.n1, self.n2 = self.P.shape
        self.spec = spec.scaled(*powers)
        w1, a1, c1, w2, a2, c2 = self.spec.padded()
        self.user = {
            1: (w1[: self.n1], a1[: self.n1], c1[: self.n1]),
            2: (w2[: self.n2], a2[: self.n2], c2[: self.n2]),
        }

    def loglik(self, user: int, x: np.ndarray) -> np.ndarray:
        """``log f(x | u)`` for every symbol, shape ``(len(x), n_symbols)``.

        Users whose components are all point masses get a log mass function
        instead; mixing point masses with continuous parts is rejected.
        """
        w, a, c = self.user[user]
        live = w > 0
        if (c[live] > 0).all():
            d = x[:, None, None] - a[None]
            lp = -0.5 * d * d / c - 0.5 * np.log(2 * math.pi * c)
            return logsumexp(lp, axis=2, b=np.broadcast_to(w, lp.shape))
        if (c[live] == 0).all():
            hit = np.isclose(x[:, None, None], a[None], rtol=0, atol=1e-12)
            mass = (hit * w[None]).sum(2)
            with np.errstate(divide="ignore"):
                return np.log(mass)
        raise ZeroVarianceComponent("mixtures mixing point masses and densities are not supported")

    def noisy_loglik(self, user: int, t: np.ndarray, s2: float) -> np.ndarray:
        """``log p(x_user + N = t | u)`` per symbol."""
        w, a, c = self.user[user]
        v = c + s2
        d = t[:, None, None] - a[None]
        lp = -0.5 * d * d / v - 0.5 * np.log(2 * math.pi * v)
        return logsumexp(lp, axis=2, b=np.broadcast_to(w, lp.shape))

    def sum_logpdf(self, y: np.ndarray, s2: float) -> np.ndarray:
        """``log p(y)`` of ``Y = X1 + X2 + N``."""
        w1, a1, c1 = self.user[1]
        w2, a2, c2 = self.user[2]
        # components indexed (u1, i, u2, j)
        W = self.P[:, None, :, None] * w1[:, :, None, None] * w2[None, None]
        A = a1[:, :, None, None] + a2[None, None]
        V = c1[:, :, None, None] + c2[None, None] + s2
        W, A, V = W.ravel(), A.ravel(), V.ravel()
        keep = W > 0
        W, A, V = W[keep], A[keep], V[keep]
        d = y[:, None] - A
        lp = -0.5 * d * d / V - 0.5 * np.log(2 * math.pi * V)
        return logsumexp(lp, axis=1, b=np.broadcast_to(W, lp.shape))

    def sample_joint(self, rng, n: int):
        flat = rng.choice(self.P.size, size=n, p=self.P.ravel())
        u1, u2 = np.unravel_index(flat, self.P.shape)
        x1 = sample_codeword(self.spec, 1, u1, rng)
        x2 = sample_codeword(self.spec, 2, u2, rng)
        return u1, u2, x1, x2


def _log_post(prior: np.ndarray, ll: np.ndarray) -> np.ndarray:
    """Row-normalized log posterior from log prior ``(k,)`` or ``(B, k)`` and log likelihood."""
    with np.errstate(divide="ignore"):
        lj = np.log(prior) + ll
    return lj - logsumexp(lj, axis=1, keepdims=True)


def _neg_log2_cond_noisy(model: _Model, user: int, t, x_other, s2):
    """``-log2 p(t | x_other)`` where ``t = x_user + noise``."""
    other = 2 if user == 1 else 1
    P = model.P if user == 1 else model.P.T  # (u_user, u_other)
    ll_other = model.loglik(other, x_other)  # (B, n_other)
    # p(u_user | x_other) is proportional to sum_{u_other} P(u_user, u_other) f(x_other | u_other)
    with np.errstate(divide="ignore"):
        lj = logsumexp(np.log(P)[None] + ll_other[:, None, :], axis=2)
    lpost = lj - logsumexp(lj, axis=1, keepdims=True)
    return -logsumexp(lpost + model.noisy_loglik(user, t, s2), axis=1) / LN2


def _estimate_joint(model: _Model, target: str, cfg: McConfig) -> MiEstimate:
    s2 = cfg.sigmaN2
    hN = _noise_entropy(s2)
    means, sizes = [], []
    for b, m in enumerate(_batches(cfg.n, cfg.batch)):
        rng = np.random.default_rng([cfg.seed, b])
        _, _, x1, x2 = model.sample_joint(rng, m)
        noise = rng.normal(0.0, math.sqrt(s2), m)
        if target == "I1":
            h = _neg_log2_cond_noisy(model, 1, x1 + noise, x2, s2)
        elif target == "I2":
            h = _neg_log2_cond_noisy(model, 2, x2 + noise, x1, s2)
        else:
            h = -model.sum_logpdf(x1 + x2 + noise, s2) / LN2
        means.append(float(h.mean()) - hN)
        sizes.append(m)
    v, se = _summarize(means, sizes)
    return MiEstimate(v, se, cfg.n)


def _estimate_stratified(model: _Model, target: str, cfg: McConfig) -> MiEstimate:
    """``I(X_k; Y | X_other, U_other) = sum_u p(u) [h(X_k + N | U_other = u) - h(N)]``.

    Given ``U_other``, ``X_k`` is independent of ``X_other``, so each stratum
    only needs draws of ``X_k + N``.
    """
    s2 = cfg.sigmaN2
    hN = _noise_entropy(s2)
    user = 1 if target == "I1c" else 2
    P = model.P if user == 1 else model.P.T  # (u_user, u_other)
    p_other = P.sum(0)
    total, var, used = 0.0, 0.0, 0
    for u in range(P.shape[1]):
        if p_other[u] == 0:
            continue
        cond = P[:, u] / p_other[u]
        n_u = max(int(round(cfg.n * p_other[u])), 1)
        means, sizes = [], []
        for b, m in enumerate(_batches(n_u, cfg.batch)):
            rng = np.random.default_rng([cfg.seed, 1 + u, b])
            sym = rng.choice(P.shape[0], size=m, p=cond)
            x = sample_codeword(model.spec, user, sym, rng)
            t = x + rng.normal(0.0, math.sqrt(s2), m)
            with np.errstate(divide="ignore"):
                lp = logsumexp(np.log(cond)[None] + model.noisy_loglik(user, t, s2), axis=1)
            means.append(float((-lp / LN2).mean()) - hN)
            sizes.append(m)
        v, se = _summarize(means, sizes)
        total += float(p_other[u] * v)
        var += (p_other[u] * se) ** 2
        used += n_u
    return MiEstimate(total, math.sqrt(var), used)


def _estimate_gaussian(g: GaussianInputs, target: str, cfg: McConfig) -> MiEstimate:
    if target in ("I1c", "I2c"):
        raise MacjscError("jointly Gaussian inputs carry no source symbols to condition on")
    s2 = cfg.sigmaN2
    hN = _noise_entropy(s2)
    K = g.covariance()
    means, sizes = [], []
    for b, m in enumerate(_batches(cfg.n, cfg.batch)):
        rng = np.random.default_rng([cfg.seed, b])
        x = rng.multivariate_normal(np.zeros(2), K, size=m, method="cholesky")
        y = x.sum(1) + rng.normal(0.0, math.sqrt(s2), m)
        if target == "Isum":
            mu, v = np.zeros(m), K.sum() + s2
        else:
            k, o = (0, 1) if target == "I1" else (1, 0)
            beta = K[k, o] / K[o, o]
            mu = x[:, o] + beta * x[:, o]
            v = K[k, k] - K[k, o] ** 2 / K[o, o] + s2
        lp = -0.5 * (y - mu) ** 2 / v - 0.5 * math.log(2 * math.pi * v)
        means.append(float((-lp / LN2).mean()) - hN)
        sizes.append(m)
    val, se = _summarize(means, sizes)
    return MiEstimate(val, se, cfg.n)


def estimate_mi(spec, pmf: JointPmf | None, target: str, cfg: McConfig = McConfig()) -> MiEstimate:
    """Estimate one of the five channel mutual informations in bits.

    Parameters
    ----------
    spec : MixtureSpec or GaussianInputs
        Channel-input law. Mixture specs are scaled by ``cfg.powers``;
        Gaussian inputs already carry their powers.
    pmf : JointPmf
        Source pmf over ``(U1, U2)``; ignored for Gaussian inputs.
    target : str
        ``"I1"``, ``"I2"``, ``"Isum"``, ``"I1c"`` or ``"I2c"``, or the
        matching label such as ``"I(X1;Y|X2,U2)"``.
    """
    t = _target(target)
    if isinstance(spec, GaussianInputs):
        return _estimate_gaussian(spec, t, cfg)
    model = _Model(spec, pmf, cfg.powers)
    if t in ("I1c", "I2c"):
        return _estimate_stratified(model, t, cfg)
    return _estimate_joint(model, t, cfg)


@dataclass(frozen=True)
class IdentityCheck:
    """Both sides of ``I(X1;Y|X2) - I(X1;Y|X2,U2) = I(X1+N;U2|X2)``."""

    lhs: float
    rhs: float
    gap: float
    lhs_stderr: float
    rhs_stderr: float
    gap_stderr: float
    n: int

    @property
    def combined_stderr(self) -> float:
        return math.hypot(self.lhs_stderr, self.rhs_stderr)


def lemma_on_identity(spec: MixtureSpec, pmf: JointPmf, cfg: McConfig = McConfig(), user: int = 1) -> IdentityCheck:
    """Estimate both sides of the bound-gap identity from one sample stream.

    The left side averages ``log p(T|U2) - log p(T|X2)`` with ``T = X1 + N``.
    The right side averages the posterior divergence
    ``sum_u p(u|X2,T) log(p(u|X2,T) / p(u|X2))``, a different estimator of
    ``I(T;U2|X2)`` built from the posterior of ``U2``.
    """
    model = _Model(spec, pmf, cfg.powers)
    s2 = cfg.sigmaN2
    other = 2 if user == 1 else 1
    P = model.P if user == 1 else model.P.T  # (u_user, u_other)
    p_other = P.sum(0)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(p_other > 0, P / p_other, 0.0)  # p(u_user | u_other)
    lmeans, rmeans, gmeans, sizes = [], [], [], []
    for b, m in enumerate(_batches(cfg.n, cfg.batch)):
        rng = np.random.default_rng([cfg.seed, b])
        u1, u2, x1, x2 = model.sample_joint(rng, m)
        noise = rng.normal(0.0, math.sqrt(s2), m)
        xk, xo, uo = (x1, x2, u2) if user == 1 else (x2, x1, u1)
        t = xk + noise
        ll_t = model.noisy_loglik(user, t, s2)  # (B, n_user)
        with np.errstate(divide="ignore"):
            # log p(t | u_other) for every u_other
            lt_given_o = logsumexp(np.log(cond.T)[None] + ll_t[:, None, :], axis=2)  # (B, n_other)
        lt_true = lt_given_o[np.arange(m), uo]
        lt_x = -_neg_log2_cond_noisy(model, user, t, xo, s2) * LN2
        lhs = (lt_true - lt_x) / LN2
        # posterior over u_other given x_other, then given (x_other, t)
        lpo = _log_post(p_other, model.loglik(other, xo))
        lpot = lpo + lt_given_o
        lpot = lpot - logsumexp(lpot, axis=1, keepdims=True)
        post = np.exp(lpot)
        with np.errstate(invalid="ignore"):
            kl = np.where(post > 0, post * (lpot - lpo), 0.0).sum(1) / LN2
        lmeans.append(float(lhs.mean()))
        rmeans.append(float(kl.mean()))
        gmeans.append(float((lhs - kl).mean()))
        sizes.append(m)
    lv, lse = _summarize(lmeans, sizes)
    rv, rse = _summarize(rmeans, sizes)
    gv, gse = _summarize(gmeans, sizes)
    return IdentityCheck(lv, rv, gv, lse, rse, gse, cfg.n)


@dataclass
class ConvergenceResult:
    estimates: list[MiEstimate]
    closed_form: float
    errors: list[float] = field(default_factory=list)


def lemma5_convergence(specs, pmf: JointPmf, rho: float, cfg: McConfig = McConfig()) -> ConvergenceResult:
    """Sum-rate estimates along a sequence of specs approaching a Gaussian target.

    ``closed_form`` is the Gaussian sum rate at correlation ``rho`` and the
    powers in ``cfg``.
    """
    P1, P2 = cfg.powers
    cf = gmac_outer_bounds(GmacParams(P1, P2, cfg.sigmaN2, rho))[2]
    ests = [estimate_mi(s, pmf, "Isum", cfg) for s in specs]
    return ConvergenceResult(ests, cf, [abs(e.value - cf) for e in ests])


def lemma2_dominance(spec: MixtureSpec, pmf: JointPmf, cfg: McConfig = McConfig()) -> tuple[MiEstimate, MiEstimate]:
    """Gaussian sum rate at the spec's covariance versus the spec's own sum rate.

    The Gaussian value is exact (standard error 0).
    """
    scaled = spec.scaled(*cfg.powers)
    P = pmf.probs
    p1, p2 = P.sum(1), P.sum(0)
    m1 = np.array([scaled.source1[u].mean() for u in range(len(p1))])
    m2 = np.array([scaled.source2[u].mean() for u in range(len(p2))])
    v1 = sum(p1[u] * scaled.source1[u].second_moment() for u in range(len(p1))) - (p1 @ m1) ** 2
    v2 = sum(p2[u] * scaled.source2[u].second_moment() for u in range(len(p2))) - (p2 @ m2) ** 2
    cov = m1 @ P @ m2 - (p1 @ m1) * (p2 @ m2)
    gauss = 0.5 * math.log2(1 + (v1 + v2 + 2 * cov) / cfg.sigmaN2)
    return MiEstimate(gauss, 0.0, 0), estimate_mi(spec, pmf, "Isum", cfg)


def gaussian_cmi_mc(cov, A, B, C=(), n: int = 200_000, seed: int = 0) -> MiEstimate:
    """Plug-in Monte Carlo ``I(A;B|C)`` for a zero-mean Gaussian vector.

    ``A``, ``B``, ``C`` are index lists into ``cov``. Averages
    ``log p(a,b,c) + log p(c) - log p(a,c) - log p(b,c)`` over samples.
    """
    cov = np.asarray(cov, dtype=float)
    A, B, C = list(A), list(B), list(C)
    rng = np.random.default_rng(seed)
    x = rng.multivariate_normal(np.zeros(len(cov)), cov, size=n, method="cholesky")

    def lp(idx):
        if not idx:
            return np.zeros(n)
        sub = cov[np.ix_(idx, idx)]
        return np.atleast_1d(multivariate_normal(np.zeros(len(idx)), sub).logpdf(x[:, idx]))

    vals = (lp(A + B + C) + lp(C) - lp(A + C) - lp(B + C)) / LN2
    return MiEstimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n)), n)
