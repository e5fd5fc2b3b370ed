"""Toy-blocklength random-coding simulator for the distributed scheme.

Each trial draws fresh random codebooks, a source block, encodes by weak
joint typicality, passes the codewords through the channel and decodes by
searching for the unique jointly typical pair of auxiliary sequences.

Failures are attributed to exactly one event, checked in this order:

``E1``
    some encoder finds no typical codeword;
``power``
    a continuous codeword exceeds its power budget;
``E2``
    the transmitted pair is not jointly typical with the channel output;
``E3`` / ``E3'``
    another typical pair differs from the truth in the first (second)
    auxiliary only;
``E4``
    every other typical pair differs in both auxiliaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .exceptions import BudgetExceeded, DecodeError, EncodingFailure, MacjscError
from .mixture import MixtureSpec, sample_codeword
from .pmf import JointPmf, entropy
from .region import SystemSpec

EVENTS = ("E1", "power", "E2", "E3", "E3'", "E4")


@dataclass(frozen=True)
class AwgnMapping:
    """Continuous channel inputs ``X_i ~ f(x | w_i)`` over ``Y = X1 + X2 + N``.

    Codewords are drawn at power ``P_i (1 - backoff)``; a codeword whose
    empirical power reaches ``P_i`` is erased.
    """

    mixture: MixtureSpec
    P1: float
    P2: float
    sigmaN2: float = 1.0
    backoff: float = 0.1


@dataclass
class CodebookConfig:
    """Simulator settings.

    ``rates`` overrides the codebook rates, which otherwise are
    ``I(U_i, Z_i; W_i) + delta``. ``max_codewords`` and ``max_pairs`` bound
    the codebook size and the decoder's pair search. With ``distinct_w`` the
    decoder's uniqueness test is over distinct auxiliary sequences, so
    duplicate codewords do not count as confusions.
    """

    spec: SystemSpec
    n: int
    delta: float = 0.2
    eps: float = 0.15
    seed: int = 0
    trials: int = 2000
    rates: tuple[float, float] | None = None
    max_codewords: int = 1 << 17
    max_pairs: int = 1 << 26
    distinct_w: bool = True
    awgn: AwgnMapping | None = None

    def __post_init__(self):
        if self.n < 1:
            raise MacjscError("blocklength must be at least 1")
        if not self.eps > 0:
            raise MacjscError("typicality slack must be positive")
        if not self.delta > 0 and self.rates is None:
            raise MacjscError("rate offset must be positive")

    def codebook_rates(self) -> tuple[float, float]:
        if self.rates is not None:
            return tuple(float(r) for r in self.rates)
        j = self.spec.joint()
        out = []
        for enc in (self.spec.enc1, self.spec.enc2):
            i = entropy(j, enc.inputs) + entropy(j, enc.output) - entropy(j, enc.inputs + (enc.output,))
            out.append(max(i, 0.0) + self.delta)
        return tuple(out)

    def codebook_sizes(self) -> tuple[int, int]:
        return tuple(max(1, math.ceil(2.0 ** (self.n * r) - 1e-9)) for r in self.codebook_rates())


@dataclass
class Codebooks:
    w: tuple[np.ndarray, np.ndarray]
    x: tuple[np.ndarray, np.ndarray]
    rates: tuple[float, float]

    @property
    def sizes(self) -> tuple[int, int]:
        return self.w[0].shape[0], self.w[1].shape[0]


@dataclass
class SimResult:
    n: int
    trials: int
    counts: dict[str, int]
    errors: int
    distortion: tuple[float, float]
    distortion_success: tuple[float, float]
    successes: int
    codebook_sizes: tuple[int, int]
    rates: tuple[float, float]
    distortion_halfwidth: tuple[float, float] = (0.0, 0.0)
    per_trial_errors: list[int] = field(default_factory=list, repr=False)

    @property
    def error_rate(self) -> float:
        return self.errors / self.trials

    def rate(self, event: str) -> float:
        return self.counts[event] / self.trials

    @property
    def error_halfwidth(self) -> float:
        p = self.error_rate
        return 1.96 * math.sqrt(p * (1 - p) / self.trials)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "codebook_sizes": list(self.codebook_sizes),
            "rates": list(self.rates),
            "counts": dict(self.counts),
            "event_rates": {k: self.rate(k) for k in EVENTS},
            "errors": self.errors,
            "error_rate": self.error_rate,
            "error_halfwidth": self.error_halfwidth,
            "distortion": list(self.distortion),
            "distortion_halfwidth": list(self.distortion_halfwidth),
            "distortion_success": list(self.distortion_success),
        }


# -- per-letter probability tables -------------------------------------------------------


class _TypicalSet:
    """Weak typicality test for one collection of discrete variables."""

    def __init__(self, joint: JointPmf, names):
        self.names = tuple(dict.fromkeys(names))
        m = joint.marginal(self.names).probs
        with np.errstate(divide="ignore"):
            self.logp = np.log2(m)
        self.H = entropy(joint, self.names) if self.names else 0.0

    def letter_logp(self, values: dict) -> np.ndarray:
        """Per-letter ``log2 p``; each value broadcasts with a trailing letter axis."""
        return self.logp[tuple(values[n] for n in self.names)]

    def rate(self, values: dict) -> np.ndarray:
        return -self.letter_logp(values).mean(axis=-1)

    def typical(self, values: dict, eps: float) -> np.ndarray:
        r = self.rate(values)
        with np.errstate(invalid="ignore"):
            return np.isfinite(r) & (np.abs(r - self.H) <= eps)


def _sample_kernel_rows(rows: np.ndarray, rng) -> np.ndarray:
    """Inverse-CDF draw from each row of ``rows`` (last axis is the outcome)."""
    cum = np.cumsum(rows, axis=-1)
    u = rng.random(rows.shape[:-1])
    out = (u[..., None] >= cum).sum(-1)
    return np.minimum(out, rows.shape[-1] - 1)


def _sample_given(table: np.ndarray, given: np.ndarray, rng) -> np.ndarray:
    """Draw ``x ~ table[g]`` for every entry ``g`` of ``given`` (single-input kernel)."""
    out = np.empty(given.shape, dtype=np.int64)
    for g in range(table.shape[0]):
        sel = given == g
        k = int(sel.sum())
        if k:
            out[sel] = rng.choice(table.shape[1], size=k, p=table[g])
    return out


def _sample_source(pmf: JointPmf, n: int, rng) -> dict:
    flat = rng.choice(pmf.probs.size, size=n, p=pmf.probs.ravel())
    cells = np.unravel_index(flat, pmf.sizes)
    return dict(zip(pmf.names, cells))


def _differential_entropy_1d(mix) -> float:
    """Differential entropy in bits of a 1-D Gaussian mixture by quadrature."""
    sd = math.sqrt(max(mix.variances.max(), 1e-12))
    lo = mix.means.min() - 12 * sd
    hi = mix.means.max() + 12 * sd

    def integrand(x):
        f = float(mix.pdf(x))
        return -f * math.log2(f) if f > 0 else 0.0

    points = sorted(set(mix.means.tolist()))
    val, _ = quad(integrand, lo, hi, points=points if len(points) < 50 else None, limit=400)
    return val


# -- codebooks, encoding, decoding --------------------------------------------------------


class _Scheme:
    """Precomputed tables shared by every trial of one configuration."""

    def __init__(self, cfg: CodebookConfig):
        self.cfg = cfg
        spec = cfg.spec
        self.spec = spec
        self.joint = spec.joint()
        self.enc = (spec.enc1, spec.enc2)
        self.chin = (spec.chin1, spec.chin2)
        self.pw = tuple(self.joint.marginal(k.output).probs for k in self.enc)
        self.enc_sets = tuple(
            (
                _TypicalSet(self.joint, k.inputs + (k.output,)),
                _TypicalSet(self.joint, k.inputs),
                _TypicalSet(self.joint, (k.output,)),
            )
            for k in self.enc
        )
        w1, w2 = spec.w1, spec.w2
        x1, x2 = spec.x1, spec.x2
        self.y = spec.y
        self.z = spec.z
        self.awgn = cfg.awgn
        if self.awgn is None:
            self.full = _TypicalSet(self.joint, (w1, w2, x1, x2) + self.y + self.z)
            self.wz = _TypicalSet(self.joint, (w1, w2) + self.z)
            self.wx = (_TypicalSet(self.joint, (w1, x1)), _TypicalSet(self.joint, (w2, x2)))
            self.yz = _TypicalSet(self.joint, self.y + self.z)
            self.support = (
                _TypicalSet(self.joint, (w1, x1) + self.y + self.z),
                _TypicalSet(self.joint, (w2, x2) + self.y + self.z),
            )
        else:
            a = self.awgn
            sizes = (self.joint.size(w1), self.joint.size(w2))
            mixes = (a.mixture.source1, a.mixture.source2)
            for s, mix in zip(sizes, mixes):
                if len(mix) < s:
                    raise MacjscError("mixture must cover every auxiliary symbol")
            self.mix = a.mixture.scaled(a.P1 * (1 - a.backoff), a.P2 * (1 - a.backoff))
            self.wz = _TypicalSet(self.joint, (w1, w2) + self.z)
            self.wmarg = (_TypicalSet(self.joint, (w1,)), _TypicalSet(self.joint, (w2,)))
            self.h_x_given_w = tuple(
                float(sum(pw[u] * _differential_entropy_1d(m) for u, m in enumerate(self.mix.mixtures(i + 1)[: len(pw)])))
                for i, pw in enumerate(self.pw)
            )
            self.hN = 0.5 * math.log2(2 * math.pi * math.e * a.sigmaN2)

    # codebooks
    def generate(self, rng, sizes) -> Codebooks:
        ws, xs = [], []
        n = self.cfg.n
        for i in range(2):
            w = rng.choice(self.pw[i].size, size=(sizes[i], n), p=self.pw[i])
            if self.awgn is None:
                x = _sample_given(self.chin[i].table, w, rng)
            else:
                x = sample_codeword(self.mix, i + 1, w, rng)
            ws.append(w)
            xs.append(x)
        return Codebooks(tuple(ws), tuple(xs), self.cfg.codebook_rates())

    def encode(self, i: int, src: dict, book: Codebooks) -> int:
        full, inputs, wonly = self.enc_sets[i]
        k = self.enc[i]
        eps = self.cfg.eps
        if not inputs.typical({n: src[n] for n in k.inputs}, eps):
            raise EncodingFailure(f"encoder {i + 1}: source block is not typical")
        vals = {n: src[n][None, :] for n in k.inputs}
        vals[k.output] = book.w[i]
        ok = full.typical(vals, eps) & wonly.typical({k.output: book.w[i]}, eps)
        hits = np.flatnonzero(ok)
        if hits.size == 0:
            raise EncodingFailure(f"encoder {i + 1}: no typical codeword")
        return int(hits[0])

    def channel(self, book: Codebooks, idx, src: dict, rng) -> dict:
        x1 = book.x[0][idx[0]]
        x2 = book.x[1][idx[1]]
        if self.awgn is not None:
            y = x1 + x2 + rng.normal(0.0, math.sqrt(self.awgn.sigmaN2), x1.shape)
            return {self.y[0]: y}
        vals = {self.spec.x1: x1, self.spec.x2: x2}
        for k in self.spec.channel:
            vals[k.output] = _sample_kernel_rows(k.table[tuple(vals[n] for n in k.inputs)], rng)
        return {n: vals[n] for n in self.y}

    # decoding
    def _pair_typical_discrete(self, book, c1, c2, obs):
        s = self.spec
        eps = self.cfg.eps
        W1 = book.w[0][c1][:, None, :]
        W2 = book.w[1][c2][None, :, :]
        vals = dict(obs)
        vals.update({s.w1: W1, s.w2: W2, s.x1: book.x[0][c1][:, None, :], s.x2: book.x[1][c2][None, :, :]})
        ok = self.full.typical(vals, eps) & self.wz.typical({s.w1: W1, s.w2: W2, **obs}, eps)
        ok &= self.wx[0].typical({s.w1: book.w[0][c1], s.x1: book.x[0][c1]}, eps)[:, None]
        ok &= self.wx[1].typical({s.w2: book.w[1][c2], s.x2: book.x[1][c2]}, eps)[None, :]
        return ok

    def _pair_typical_awgn(self, book, c1, c2, obs, y):
        s = self.spec
        eps = self.cfg.eps
        W1 = book.w[0][c1][:, None, :]
        W2 = book.w[1][c2][None, :, :]
        lw = self.wz.letter_logp({s.w1: W1, s.w2: W2, **obs})
        lx = []
        for i, c in enumerate((c1, c2)):
            w, x = book.w[i][c], book.x[i][c]
            mix = self.mix.mixtures(i + 1)
            ll = np.empty(x.shape)
            for u in np.unique(w):
                sel = w == u
                ll[sel] = np.log2(mix[u].pdf(x[sel]))
            lx.append(ll)
        resid = y[None, None, :] - book.x[0][c1][:, None, :] - book.x[1][c2][None, :, :]
        s2 = self.awgn.sigmaN2
        ln = (-0.5 * resid**2 / s2 - 0.5 * math.log(2 * math.pi * s2)) / math.log(2)
        tot = lw + lx[0][:, None, :] + lx[1][None, :, :] + ln
        H = self.wz.H + self.h_x_given_w[0] + self.h_x_given_w[1] + self.hN
        ok = np.abs(-tot.mean(-1) - H) <= eps
        ok &= self.wz.typical({s.w1: W1, s.w2: W2, **obs}, eps)
        for i, c in enumerate((c1, c2)):
            wt = self.wmarg[i].letter_logp({(s.w1, s.w2)[i]: book.w[i][c]})
            r = -(wt + lx[i]).mean(-1)
            good = np.abs(r - (self.wmarg[i].H + self.h_x_given_w[i])) <= eps
            ok &= good[:, None] if i == 0 else good[None, :]
        return ok

    def candidates(self, book: Codebooks, obs: dict):
        """Codeword indices whose letters are all compatible with the observation."""
        if self.awgn is not None:
            return np.arange(book.sizes[0]), np.arange(book.sizes[1])
        s = self.spec
        out = []
        for i, (wn, xn) in enumerate(((s.w1, s.x1), (s.w2, s.x2))):
            vals = dict(obs)
            vals[wn] = book.w[i]
            vals[xn] = book.x[i]
            lp = self.support[i].letter_logp(vals)
            out.append(np.flatnonzero(np.isfinite(lp).all(-1)))
        return tuple(out)

    def pair_ok(self, book: Codebooks, c1, c2, obs: dict, y=None) -> np.ndarray:
        """Typicality of every pair in ``c1 x c2``, shape ``(len(c1), len(c2))``."""
        c1, c2 = np.atleast_1d(c1), np.atleast_1d(c2)
        if self.awgn is None:
            if not self.yz.typical(obs, self.cfg.eps):
                return np.zeros((c1.size, c2.size), dtype=bool)
            return self._pair_typical_discrete(book, c1, c2, obs)
        obs_z = {k: v for k, v in obs.items() if k in self.z}
        return self._pair_typical_awgn(book, c1, c2, obs_z, y)

    def search(self, book: Codebooks, obs: dict, y=None, limit: int = 2) -> list[tuple[int, int]]:
        """Up to ``limit`` typical pairs, scanning in chunks with early exit.

        With ``distinct_w`` pairs sharing both auxiliary sequences count once.
        """
        c1, c2 = self.candidates(book, obs)
        if c1.size * c2.size > self.cfg.max_pairs:
            raise BudgetExceeded(
                f"decoder would test {c1.size * c2.size} codeword pairs", count=int(c1.size * c2.size)
            )
        found, seen = [], set()
        if c2.size == 0:
            return found
        step = max(1, (1 << 16) // c2.size)
        for lo in range(0, c1.size, step):
            rows = c1[lo : lo + step]
            ii, jj = np.nonzero(self.pair_ok(book, rows, c2, obs, y))
            for i, j in zip(rows[ii].tolist(), c2[jj].tolist()):
                if self.cfg.distinct_w:
                    key = book.w[0][i].tobytes() + book.w[1][j].tobytes()
                    if key in seen:
                        continue
                    seen.add(key)
                found.append((i, j))
                if len(found) >= limit:
                    return found
        return found

    def decode(self, book: Codebooks, obs: dict, y=None) -> tuple[int, int]:
        found = self.search(book, obs, y, limit=2)
        if not found:
            raise DecodeError("none")
        if len(found) > 1:
            raise DecodeError("ambiguous", found)
        return found[0]

    def attribute(self, book: Codebooks, idx, obs: dict, y, decoded) -> str | None:
        """Event label for a trial whose encoders succeeded, or ``None`` on success."""
        if not self.pair_ok(book, idx[0], idx[1], obs, y)[0, 0]:
            return "E2"
        w1, w2 = book.w[0][idx[0]], book.w[1][idx[1]]
        if decoded is not None:
            same = (book.w[0][decoded[0]] == w1).all() and (book.w[1][decoded[1]] == w2).all()
            return None if same else "E4"
        c1, c2 = self.candidates(book, obs)
        # confusions in one index with the other held at the truth
        for user, cands in ((0, c1), (1, c2)):
            if user == 0:
                ok = self.pair_ok(book, cands, idx[1], obs, y)[:, 0]
            else:
                ok = self.pair_ok(book, idx[0], cands, obs, y)[0]
            other = cands[ok]
            if self.cfg.distinct_w:
                hit = (~(book.w[user][other] == (w1, w2)[user]).all(1)).any()
            else:
                hit = (other != idx[user]).any()
            if hit:
                return "E3" if user == 0 else "E3'"
        return "E4"

    def reconstruct(self, w1, w2, src_z: dict):
        vals = {self.spec.w1: w1, self.spec.w2: w2, **src_z}
        out = []
        for _, _, table in self.spec.decoder.outputs:
            out.append(table[tuple(vals[n] for n, _ in self.spec.decoder.inputs)])
        return out


def generate_codebooks(cfg: CodebookConfig, rng=None) -> Codebooks:
    """Draw ``ceil(2^(n R_i'))`` auxiliary codewords per user with channel sequences.

    Raises
    ------
    BudgetExceeded
        When a codebook would exceed ``cfg.max_codewords``.
    """
    sizes = cfg.codebook_sizes()
    for m in sizes:
        if m > cfg.max_codewords:
            raise BudgetExceeded(f"codebook of {m} codewords exceeds budget {cfg.max_codewords}", count=m)
    return _Scheme(cfg).generate(np.random.default_rng(rng), sizes)


def encode_block(cfg: CodebookConfig, user: int, source_block: dict, book: Codebooks) -> int:
    """First codeword index jointly typical with the user's source block.

    ``source_block`` maps the encoder's input names to length-``n`` arrays.

    Raises
    ------
    EncodingFailure
        When no codeword is typical.
    """
    return _Scheme(cfg).encode(user - 1, source_block, book)


def decode_block(cfg: CodebookConfig, observation: dict, book: Codebooks) -> tuple[int, int]:
    """Unique pair of codeword indices jointly typical with the observation.

    ``observation`` maps the channel output and decoder side-information
    names to length-``n`` arrays.

    Raises
    ------
    DecodeError
        ``kind == "none"`` without a typical pair, ``"ambiguous"`` with several.
    """
    scheme = _Scheme(cfg)
    y = observation.get(scheme.y[0]) if cfg.awgn is not None else None
    return scheme.decode(book, observation, y)


def run_experiment(cfg: CodebookConfig) -> SimResult:
    """Run ``cfg.trials`` independent trials, each with fresh codebooks.

    Trial ``t`` uses the random stream seeded by ``(seed, n, t)``. Decoder
    failures incur the maximum distortion; other failures are scored on
    the actual reconstruction.
    """
    scheme = _Scheme(cfg)
    sizes = cfg.codebook_sizes()
    for m in sizes:
        if m > cfg.max_codewords:
            raise BudgetExceeded(f"codebook of {m} codewords exceeds budget {cfg.max_codewords}", count=m)
    spec = cfg.spec
    dmax = (spec.d1.max, spec.d2.max)
    counts = {e: 0 for e in EVENTS}
    dist = np.zeros((cfg.trials, 2))
    success = np.zeros(cfg.trials, dtype=bool)
    per_trial = []
    for t in range(cfg.trials):
        rng = np.random.default_rng([cfg.seed, cfg.n, t])
        book = scheme.generate(rng, sizes)
        src = _sample_source(spec.source, cfg.n, rng)
        idx, event = [], None
        for i in range(2):
            try:
                idx.append(scheme.encode(i, src, book))
            except EncodingFailure:
                idx.append(0)
                event = event or "E1"
        if cfg.awgn is not None and event is None:
            for i, P in enumerate((cfg.awgn.P1, cfg.awgn.P2)):
                if np.mean(book.x[i][idx[i]] ** 2) >= P:
                    event = "power"
        obs = scheme.channel(book, idx, src, rng)
        obs.update({n: src[n] for n in scheme.z})
        y = obs[scheme.y[0]] if cfg.awgn is not None else None
        try:
            decoded = scheme.decode(book, obs, y)
        except DecodeError:
            decoded = None
        decode_failed = decoded is None
        if event is None:
            event = scheme.attribute(book, idx, obs, y, decoded)
        if event is not None:
            counts[event] += 1
        per_trial.append(0 if event is None else 1)
        success[t] = event is None
        zsrc = {n: src[n] for n in scheme.z}
        if decode_failed:
            dist[t] = dmax
        else:
            uh = scheme.reconstruct(book.w[0][decoded[0]], book.w[1][decoded[1]], zsrc)
            dist[t, 0] = spec.d1.table[src[spec.u1], uh[0]].mean()
            dist[t, 1] = spec.d2.table[src[spec.u2], uh[1]].mean()
    errors = int(sum(counts.values()))
    d = tuple(float(v) for v in dist.mean(0))
    hw = tuple(float(1.96 * v / math.sqrt(cfg.trials)) for v in dist.std(0, ddof=1)) if cfg.trials > 1 else (0.0, 0.0)
    ds = tuple(float(v) for v in dist[success].mean(0)) if success.any() else (math.nan, math.nan)
    return SimResult(
        n=cfg.n,
        trials=cfg.trials,
        counts=counts,
        errors=errors,
        distortion=d,
        distortion_success=ds,
        successes=int(success.sum()),
        codebook_sizes=sizes,
        rates=cfg.codebook_rates(),
        distortion_halfwidth=hw,
        per_trial_errors=per_trial,
    )


def sweep_blocklengths(cfg: CodebookConfig, ns) -> list[SimResult]:
    """Run the same configuration at several blocklengths."""
    from dataclasses import replace

    return [run_experiment(replace(cfg, n=int(n))) for n in ns]
