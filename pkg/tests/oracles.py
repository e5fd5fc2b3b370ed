"""Independent reference computations shared by the unit and acceptance tests."""
import math

import numpy as np
from scipy import integrate


def logdet_cmi(K, A, B, C=()):
    """I(A;B|C) in bits for a Gaussian vector with covariance K."""
    A, B, C = list(A), list(B), list(C)

    def ld(idx):
        return np.linalg.slogdet(K[np.ix_(idx, idx)])[1] if idx else 0.0

    return 0.5 * (ld(A + C) + ld(B + C) - ld(A + B + C) - ld(C)) / math.log(2)


def _components(mix):
    return [(w, m, 1.0 / math.sqrt(2 * math.pi * v), -0.5 / v) for w, m, v in zip(mix.weights, mix.means, mix.variances)]


def quad_l2(spec, P, rho, half_width=6.0):
    """int (g - f_rho)^2 over [-w, w]^2 by adaptive quadrature.

    Densities are written out with ``math`` so the oracle shares no code
    with the library.
    """
    P = np.asarray(P).tolist()
    n1, n2 = len(P), len(P[0])
    c1 = [_components(spec.source1[u]) for u in range(n1)]
    c2 = [_components(spec.source2[u]) for u in range(n2)]
    q = 1.0 - rho * rho
    fnorm = 1.0 / (2 * math.pi * math.sqrt(q))

    def pdf(comps, x):
        return sum(w * k * math.exp(e * (x - m) ** 2) for w, m, k, e in comps)

    def integrand(x2, x1):
        a = [pdf(c, x1) for c in c1]
        b = [pdf(c, x2) for c in c2]
        g = sum(P[i][j] * a[i] * b[j] for i in range(n1) for j in range(n2))
        f = fnorm * math.exp(-(x1 * x1 - 2 * rho * x1 * x2 + x2 * x2) / (2 * q))
        return (g - f) ** 2

    w = half_width
    val, _ = integrate.dblquad(integrand, -w, w, -w, w, epsabs=1e-10, epsrel=1e-9)
    return val


def _mixture_entropy_bits(weights, means, variances, lo=None, hi=None):
    """Differential entropy of a 1-D Gaussian mixture by quadrature."""
    w, m, v = (np.asarray(t, dtype=float) for t in (weights, means, variances))
    keep = w > 0
    w, m, v = w[keep], m[keep], v[keep]
    s = np.sqrt(v)
    lo = (m - 12 * s).min() if lo is None else lo
    hi = (m + 12 * s).max() if hi is None else hi

    def integrand(x):
        p = float(np.sum(w * np.exp(-0.5 * (x - m) ** 2 / v) / np.sqrt(2 * math.pi * v)))
        return -p * math.log(p) if p > 0 else 0.0

    val, _ = integrate.quad(integrand, lo, hi, limit=400, points=sorted(set(np.round(m, 6)))[:50], epsabs=1e-12)
    return val / math.log(2)


def conditional_rate(spec, P, user, powers, s2):
    """I(X_k;Y|X_other,U_other) for channel inputs built from mixture ``spec``.

    Given ``U_other`` the input ``X_k`` is independent of ``X_other``, so the
    rate is ``sum_u p(u) h(X_k + N | U_other = u) - h(N)``.
    """
    P = np.asarray(P) if user == 1 else np.asarray(P).T
    mixes = spec.source1 if user == 1 else spec.source2
    pw = powers[user - 1]
    total = 0.0
    for uo in range(P.shape[1]):
        po = P[:, uo].sum()
        if po == 0:
            continue
        w, m, v = [], [], []
        for uk in range(P.shape[0]):
            c = P[uk, uo] / po
            mix = mixes[uk]
            w += list(c * mix.weights)
            m += list(math.sqrt(pw) * mix.means)
            v += list(pw * mix.variances + s2)
        total += po * _mixture_entropy_bits(w, m, v)
    return total - 0.5 * math.log2(2 * math.pi * math.e * s2)


def sum_rate(spec, P, powers, s2):
    """I(X1,X2;Y) = h(X1 + X2 + N) - h(N) for mixture inputs."""
    P = np.asarray(P)
    w, m, v = [], [], []
    r1, r2 = math.sqrt(powers[0]), math.sqrt(powers[1])
    for i in range(P.shape[0]):
        for j in range(P.shape[1]):
            if P[i, j] == 0:
                continue
            a, b = spec.source1[i], spec.source2[j]
            for wa, ma, va in zip(a.weights, a.means, a.variances):
                for wb, mb, vb in zip(b.weights, b.means, b.variances):
                    w.append(P[i, j] * wa * wb)
                    m.append(r1 * ma + r2 * mb)
                    v.append(powers[0] * va + powers[1] * vb + s2)
    return _mixture_entropy_bits(w, m, v) - 0.5 * math.log2(2 * math.pi * math.e * s2)
