"""Achievability checks for correlated sources over a MAC with side information.

A :class:`SystemSpec` fixes every distribution in the coding scheme: the
source and side-information pmf, the quantizers ``p(w_i | u_i, z_i)``, the
channel-input maps ``p(x_i | w_i)``, the channel ``p(y | x1, x2)`` and a
deterministic decoder ``(w1, w2, z) -> (uhat1, uhat2)``. :func:`check_theorem1`
builds the full joint and reports every inequality with its margin.

Inequalities are strict. A margin within ``BOUNDARY_TOL`` of zero is
reported as ``"boundary"``, which does not count as satisfied.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import AlphabetMismatch, MissingParam, NotOrthogonal, ShapeMismatch
from .pmf import (
    DiscreteKernel,
    DistortionMeasure,
    JointPmf,
    attach_kernel,
    constant_kernel,
    deterministic_kernel,
    entropy,
    expected_distortion,
    identity_kernel,
    make_joint,
    mutual_info,
    product,
    uniform_kernel,
)

BOUNDARY_TOL = 1e-9


def _names(x) -> tuple[str, ...]:
    if x is None:
        return ()
    if isinstance(x, str):
        return (x,)
    return tuple(x)


def _minus(a: Sequence[str], b: Sequence[str]) -> tuple[str, ...]:
    return tuple(n for n in a if n not in set(b))


def _unique(seq) -> tuple[str, ...]:
    return tuple(dict.fromkeys(seq))


def _cmi(joint: JointPmf, A, B, C) -> float:
    """``I(A; B | C)`` where ``A`` and ``B`` may share names with ``C``.

    Variables already in the conditioning set carry no information, so they
    are dropped from ``A`` and ``B`` first.
    """
    C = _unique(C)
    A, B = _minus(_unique(A), C), _minus(_unique(B), C)
    if not A or not B:
        return 0.0
    v = mutual_info(joint, A, B, C)
    # entropy differences can land a rounding error below zero
    return 0.0 if abs(v) < 1e-12 else v


# -- decoder ------------------------------------------------------------------


@dataclass(frozen=True)
class Decoder:
    """Deterministic decoder given as lookup tables.

    Parameters
    ----------
    inputs : tuple of (name, size)
        Decoder arguments, e.g. ``(("W1", 2), ("W2", 2))``.
    outputs : tuple of (name, size, table)
        One entry per reconstruction; ``table`` is an integer array indexed by
        the inputs.
    """

    inputs: tuple[tuple[str, int], ...]
    outputs: tuple[tuple[str, int, np.ndarray], ...]

    def __post_init__(self):
        shape = tuple(s for _, s in self.inputs)
        outs = []
        for name, size, table in self.outputs:
            table = np.asarray(table, dtype=int)
            if table.shape != shape:
                raise ShapeMismatch(f"decoder table {name!r} has shape {table.shape}; expected {shape}")
            if table.size and (table.min() < 0 or table.max() >= size):
                raise AlphabetMismatch(f"decoder table {name!r} outside alphabet of size {size}")
            outs.append((name, int(size), table))
        object.__setattr__(self, "inputs", tuple((n, int(s)) for n, s in self.inputs))
        object.__setattr__(self, "outputs", tuple(outs))

    @classmethod
    def from_function(cls, inputs, outputs: Sequence[tuple[str, int]], fn: Callable) -> Decoder:
        """``fn(*symbols)`` returns a tuple with one reconstruction per output."""
        shape = tuple(s for _, s in inputs)
        tables = [np.zeros(shape, dtype=int) for _ in outputs]
        for cell in itertools.product(*(range(s) for s in shape)):
            vals = fn(*cell)
            for t, v in zip(tables, vals):
                t[cell] = v
        return cls(tuple(inputs), tuple((n, s, t) for (n, s), t in zip(outputs, tables)))

    @classmethod
    def identity(cls, w_inputs: Sequence[tuple[str, int]], z_inputs=(), names=("U1hat", "U2hat")) -> Decoder:
        """Reconstruct each source as its own auxiliary: ``uhat_i = w_i``."""
        inputs = tuple(w_inputs) + tuple(z_inputs)
        k = len(w_inputs)
        outs = [(n, s) for n, (_, s) in zip(names, w_inputs)]
        return cls.from_function(inputs, outs, lambda *c: tuple(c[:k]))

    def kernels(self) -> list[DiscreteKernel]:
        return [
            deterministic_kernel(self.inputs, name, size, lambda *c, t=table: t[c])
            for name, size, table in self.outputs
        ]

    def to_dict(self) -> dict:
        return {
            "inputs": [{"name": n, "size": s} for n, s in self.inputs],
            "outputs": [
                {"name": n, "size": s, "table": t.ravel().tolist()} for n, s, t in self.outputs
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> Decoder:
        inputs = tuple((v["name"], int(v["size"])) for v in d["inputs"])
        shape = tuple(s for _, s in inputs)
        outs = tuple(
            (o["name"], int(o["size"]), np.asarray(o["table"], dtype=int).reshape(shape))
            for o in d["outputs"]
        )
        return cls(inputs, outs)


def optimal_decoder(
    joint: JointPmf,
    inputs: Sequence[str],
    targets: Sequence[tuple[str, DistortionMeasure]],
    names: Sequence[str] | None = None,
) -> Decoder:
    """Decoder minimizing each expected distortion given ``inputs``.

    For each input cell and each target ``(u, d)``, picks
    ``argmin_uhat sum_u p(u, cell) d(u, uhat)``.
    """
    inputs = tuple(inputs)
    names = tuple(names) if names is not None else tuple(f"{u}hat" for u, _ in targets)
    shape = tuple(joint.size(n) for n in inputs)
    outs = []
    for name, (u, d) in zip(names, targets):
        m = joint.marginal(inputs + (u,)).probs  # (*inputs, u)
        cost = np.tensordot(m, d.table, axes=([m.ndim - 1], [0]))  # (*inputs, uhat)
        outs.append((name, d.table.shape[1], np.argmin(cost, axis=-1).reshape(shape)))
    return Decoder(tuple(zip(inputs, shape)), tuple(outs))


# -- reports ------------------------------------------------------------------


@dataclass
class RegionRow:
    label: str
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def status(self) -> str:
        if abs(self.margin) <= BOUNDARY_TOL:
            return "boundary"
        return "satisfied" if self.margin > 0 else "violated"

    @property
    def satisfied(self) -> bool:
        return self.status == "satisfied"


@dataclass
class DistortionRow:
    label: str
    achieved: float
    target: float

    @property
    def satisfied(self) -> bool:
        return self.achieved <= self.target + BOUNDARY_TOL


@dataclass
class RegionReport:
    rows: list[RegionRow]
    distortion_rows: list[DistortionRow] = field(default_factory=list)
    exact: bool | None = None
    title: str = ""

    @property
    def verdict(self) -> bool:
        return all(r.satisfied for r in self.rows) and all(r.satisfied for r in self.distortion_rows)

    @property
    def feasible(self) -> bool:
        return self.verdict

    def lhs(self) -> np.ndarray:
        return np.array([r.lhs for r in self.rows])

    def rhs(self) -> np.ndarray:
        return np.array([r.rhs for r in self.rows])

    def to_dict(self) -> dict:
        d = {
            "title": self.title,
            "rows": [
                {
                    "label": r.label,
                    "lhs": r.lhs,
                    "rhs": r.rhs,
                    "margin": r.margin,
                    "status": r.status,
                    "satisfied": r.satisfied,
                }
                for r in self.rows
            ],
            "distortion": [
                {"label": r.label, "achieved": r.achieved, "target": r.target, "satisfied": r.satisfied}
                for r in self.distortion_rows
            ],
            "verdict": "feasible" if self.verdict else "infeasible",
        }
        if self.exact is not None:
            d["exact"] = self.exact
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_text(self) -> str:
        width = max([len(r.label) for r in self.rows + self.distortion_rows] + [10])
        lines = []
        if self.title:
            lines.append(self.title)
        lines.append(f"{'constraint':<{width}}  {'lhs':>10}  {'rhs':>10}  {'margin':>10}  status")
        for r in self.rows:
            lines.append(
                f"{r.label:<{width}}  {r.lhs:>10.6g}  {r.rhs:>10.6g}  {r.margin:>10.6g}  {r.status}"
            )
        for r in self.distortion_rows:
            status = "satisfied" if r.satisfied else "violated"
            lines.append(
                f"{r.label:<{width}}  {r.achieved:>10.6g}  {r.target:>10.6g}  "
                f"{r.target - r.achieved:>10.6g}  {status}"
            )
        if self.exact is not None:
            lines.append(f"necessary and sufficient: {'yes' if self.exact else 'no'}")
        lines.append(f"verdict: {'feasible' if self.verdict else 'infeasible'}")
        return "\n".join(lines)


# -- system specs ---------------------------------------------------------------


@dataclass
class SystemSpec:
    """A complete two-user instance of the coding scheme.

    Role fields name variables of ``source``: ``u1``/``u2`` are the sources,
    ``z1``/``z2`` the encoder side information and ``z`` the decoder side
    information (which may reuse ``z1``/``z2`` names). Kernel outputs name the
    auxiliaries, channel inputs and channel output(s). ``channel`` is either a
    single kernel over ``(X1, X2)`` or a sequence of kernels, as for
    orthogonal channels.
    """

    source: JointPmf
    u1: str
    u2: str
    enc1: DiscreteKernel
    enc2: DiscreteKernel
    chin1: DiscreteKernel
    chin2: DiscreteKernel
    channel: DiscreteKernel | tuple[DiscreteKernel, ...]
    decoder: Decoder
    z1: tuple[str, ...] = ()
    z2: tuple[str, ...] = ()
    z: tuple[str, ...] = ()
    d1: DistortionMeasure | None = None
    d2: DistortionMeasure | None = None
    D1: float = 0.0
    D2: float = 0.0

    def __post_init__(self):
        self.z1, self.z2, self.z = _names(self.z1), _names(self.z2), _names(self.z)
        if isinstance(self.channel, DiscreteKernel):
            self.channel = (self.channel,)
        else:
            self.channel = tuple(self.channel)
        for n in (self.u1, self.u2) + self.z1 + self.z2 + self.z:
            self.source.axis(n)
        if self.d1 is None:
            self.d1 = DistortionMeasure.hamming(self.source.size(self.u1))
        if self.d2 is None:
            self.d2 = DistortionMeasure.hamming(self.source.size(self.u2))
        if len(self.decoder.outputs) != 2:
            raise ShapeMismatch("two-user decoder must have two outputs")
        self.joint()  # fail early on inconsistent kernels

    @property
    def w1(self) -> str:
        return self.enc1.output

    @property
    def w2(self) -> str:
        return self.enc2.output

    @property
    def x1(self) -> str:
        return self.chin1.output

    @property
    def x2(self) -> str:
        return self.chin2.output

    @property
    def y(self) -> tuple[str, ...]:
        return tuple(k.output for k in self.channel)

    @property
    def uhat(self) -> tuple[str, str]:
        return (self.decoder.outputs[0][0], self.decoder.outputs[1][0])

    def joint(self) -> JointPmf:
        """The full factorized joint including the reconstructions."""
        cached = getattr(self, "_joint", None)
        if cached is not None:
            return cached
        j = self.source
        for k in (self.enc1, self.enc2, self.chin1, self.chin2) + self.channel:
            j = attach_kernel(j, k)
        dec_in = {n for n, _ in self.decoder.inputs}
        if not dec_in <= {self.w1, self.w2} | set(self.z):
            raise ShapeMismatch(f"decoder reads {sorted(dec_in)}; allowed are W1, W2 and Z")
        for k in self.decoder.kernels():
            j = attach_kernel(j, k)
        object.__setattr__(self, "_joint", j)
        return j

    def as_multi(self) -> MultiSpec:
        return MultiSpec(
            source=self.source,
            u=(self.u1, self.u2),
            zs=(self.z1, self.z2),
            z=self.z,
            encoders=(self.enc1, self.enc2),
            chins=(self.chin1, self.chin2),
            channel=self.channel,
            decoder=self.decoder,
            distortions=(self.d1, self.d2),
            targets=(self.D1, self.D2),
        )

    def to_dict(self) -> dict:
        return {
            "source": self.source.to_dict(),
            "roles": {"u1": self.u1, "u2": self.u2, "z1": list(self.z1), "z2": list(self.z2), "z": list(self.z)},
            "enc1": self.enc1.to_dict(),
            "enc2": self.enc2.to_dict(),
            "chin1": self.chin1.to_dict(),
            "chin2": self.chin2.to_dict(),
            "channel": [k.to_dict() for k in self.channel],
            "decoder": self.decoder.to_dict(),
            "distortion": [
                {"table": self.d1.table.tolist(), "lossless": self.d1.lossless, "target": self.D1},
                {"table": self.d2.table.tolist(), "lossless": self.d2.lossless, "target": self.D2},
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> SystemSpec:
        roles = d["roles"]
        ch = d["channel"]
        channel = tuple(DiscreteKernel.from_dict(k) for k in (ch if isinstance(ch, list) else [ch]))
        dist = d.get("distortion") or [{}, {}]

        def measure(e):
            if "table" not in e:
                return None
            return DistortionMeasure(np.asarray(e["table"], dtype=float), bool(e.get("lossless", False)))

        return cls(
            source=JointPmf.from_dict(d["source"]),
            u1=roles["u1"],
            u2=roles["u2"],
            z1=tuple(roles.get("z1", ())),
            z2=tuple(roles.get("z2", ())),
            z=tuple(roles.get("z", ())),
            enc1=DiscreteKernel.from_dict(d["enc1"]),
            enc2=DiscreteKernel.from_dict(d["enc2"]),
            chin1=DiscreteKernel.from_dict(d["chin1"]),
            chin2=DiscreteKernel.from_dict(d["chin2"]),
            channel=channel,
            decoder=Decoder.from_dict(d["decoder"]),
            d1=measure(dist[0]),
            d2=measure(dist[1]),
            D1=float(dist[0].get("target", 0.0)),
            D2=float(dist[1].get("target", 0.0)),
        )


@dataclass
class MultiSpec:
    """``M``-user generalization of :class:`SystemSpec`."""

    source: JointPmf
    u: tuple[str, ...]
    zs: tuple[tuple[str, ...], ...]
    z: tuple[str, ...]
    encoders: tuple[DiscreteKernel, ...]
    chins: tuple[DiscreteKernel, ...]
    channel: DiscreteKernel | tuple[DiscreteKernel, ...]
    decoder: Decoder | None = None
    distortions: tuple[DistortionMeasure, ...] | None = None
    targets: tuple[float, ...] | None = None

    def __post_init__(self):
        self.u = _names(self.u)
        m = len(self.u)
        if m < 2:
            raise MissingParam("need at least two sources")
        self.zs = tuple(_names(z) for z in self.zs) if self.zs else ((),) * m
        self.z = _names(self.z)
        if isinstance(self.channel, DiscreteKernel):
            self.channel = (self.channel,)
        if not (len(self.zs) == len(self.encoders) == len(self.chins) == m):
            raise ShapeMismatch("per-source lists must all have length M")
        if self.distortions is None:
            self.distortions = tuple(DistortionMeasure.hamming(self.source.size(n)) for n in self.u)
        if self.targets is None:
            self.targets = (0.0,) * m

    @property
    def M(self) -> int:
        return len(self.u)

    def to_dict(self) -> dict:
        d = {
            "source": self.source.to_dict(),
            "u": list(self.u),
            "zs": [list(z) for z in self.zs],
            "z": list(self.z),
            "encoders": [k.to_dict() for k in self.encoders],
            "chins": [k.to_dict() for k in self.chins],
            "channel": [k.to_dict() for k in self.channel],
            "distortion": [
                {"table": d.table.tolist(), "lossless": d.lossless, "target": t}
                for d, t in zip(self.distortions, self.targets)
            ],
        }
        if self.decoder is not None:
            d["decoder"] = self.decoder.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> MultiSpec:
        ch = d["channel"]
        dist = d.get("distortion")
        return cls(
            source=JointPmf.from_dict(d["source"]),
            u=tuple(d["u"]),
            zs=tuple(tuple(z) for z in d.get("zs", [])),
            z=tuple(d.get("z", ())),
            encoders=tuple(DiscreteKernel.from_dict(k) for k in d["encoders"]),
            chins=tuple(DiscreteKernel.from_dict(k) for k in d["chins"]),
            channel=tuple(DiscreteKernel.from_dict(k) for k in (ch if isinstance(ch, list) else [ch])),
            decoder=Decoder.from_dict(d["decoder"]) if "decoder" in d else None,
            distortions=None if dist is None else tuple(
                DistortionMeasure(np.asarray(e["table"], dtype=float), bool(e.get("lossless", False))) for e in dist
            ),
            targets=None if dist is None else tuple(float(e.get("target", 0.0)) for e in dist),
        )

    def joint(self) -> JointPmf:
        j = self.source
        for k in tuple(self.encoders) + tuple(self.chins) + tuple(self.channel):
            j = attach_kernel(j, k)
        if self.decoder is not None:
            for k in self.decoder.kernels():
                j = attach_kernel(j, k)
        return j


# -- checks -----------------------------------------------------------------------


def _distortion_rows(joint, pairs) -> list[DistortionRow]:
    rows = []
    for i, (u, uhat, d, D) in enumerate(pairs, start=1):
        rows.append(DistortionRow(f"E[d{i}({u},{uhat})] <= D{i}", expected_distortion(joint, u, uhat, d), D))
    return rows


def check_theorem1(spec: SystemSpec) -> RegionReport:
    """Evaluate the three two-user inequalities and both distortion constraints."""
    j = spec.joint()
    s1 = (spec.u1,) + spec.z1
    s2 = (spec.u2,) + spec.z2
    Y = spec.y
    rows = [
        RegionRow(
            "I(U1,Z1;W1|W2,Z) < I(X1;Y|X2,W2,Z)",
            _cmi(j, s1, (spec.w1,), (spec.w2,) + spec.z),
            _cmi(j, (spec.x1,), Y, (spec.x2, spec.w2) + spec.z),
        ),
        RegionRow(
            "I(U2,Z2;W2|W1,Z) < I(X2;Y|X1,W1,Z)",
            _cmi(j, s2, (spec.w2,), (spec.w1,) + spec.z),
            _cmi(j, (spec.x2,), Y, (spec.x1, spec.w1) + spec.z),
        ),
        RegionRow(
            "I(U1,U2,Z1,Z2;W1,W2|Z) < I(X1,X2;Y|Z)",
            _cmi(j, s1 + s2, (spec.w1, spec.w2), spec.z),
            _cmi(j, (spec.x1, spec.x2), Y, spec.z),
        ),
    ]
    uh1, uh2 = spec.uhat
    dist = _distortion_rows(j, [(spec.u1, uh1, spec.d1, spec.D1), (spec.u2, uh2, spec.d2, spec.D2)])
    return RegionReport(rows, dist, title="two-user MAC with side information")


def _subset_label(A, M) -> str:
    return "A={" + ",".join(str(i + 1) for i in A) + "}"


def subsets(M: int) -> list[tuple[int, ...]]:
    """Nonempty subsets of ``range(M)``, by size then lexicographically."""
    return [c for k in range(1, M + 1) for c in itertools.combinations(range(M), k)]


def check_multiuser(spec: MultiSpec) -> RegionReport:
    """One row per nonempty subset ``A`` of the users (``A = S`` included).

    ``I(U_A, Z_A; W_A | W_Ac, Z) < I(X_A; Y | X_Ac, W_Ac, Z)``.
    """
    j = spec.joint()
    M = spec.M
    W = [k.output for k in spec.encoders]
    X = [k.output for k in spec.chins]
    Y = tuple(k.output for k in spec.channel)
    rows = []
    for A in subsets(M):
        Ac = [i for i in range(M) if i not in A]
        src = tuple(itertools.chain.from_iterable((spec.u[i],) + spec.zs[i] for i in A))
        lhs = _cmi(j, src, tuple(W[i] for i in A), tuple(W[i] for i in Ac) + spec.z)
        rhs = _cmi(j, tuple(X[i] for i in A), Y, tuple(X[i] for i in Ac) + tuple(W[i] for i in Ac) + spec.z)
        rows.append(RegionRow(_subset_label(A, M), lhs, rhs))
    dist = []
    if spec.decoder is not None:
        outs = [o[0] for o in spec.decoder.outputs]
        dist = _distortion_rows(
            j, [(spec.u[i], outs[i], spec.distortions[i], spec.targets[i]) for i in range(min(M, len(outs)))]
        )
    return RegionReport(rows, dist, title=f"{M}-user MAC with side information")


def sw_rate_bounds(source: JointPmf, enc1: DiscreteKernel, enc2: DiscreteKernel, z=()) -> tuple[float, float, float]:
    """Rate lower bounds for distributed lossy coding with side information.

    The encoders' inputs are the ``(U_i, Z_i)`` tuples. Returns
    ``(I(U1,Z1;W1|W2,Z), I(U2,Z2;W2|W1,Z), I(U1,U2,Z1,Z2;W1,W2|Z))``.
    """
    z = _names(z)
    j = attach_kernel(attach_kernel(source, enc1), enc2)
    w1, w2 = enc1.output, enc2.output
    return (
        _cmi(j, enc1.inputs, (w1,), (w2,) + z),
        _cmi(j, enc2.inputs, (w2,), (w1,) + z),
        _cmi(j, _unique(enc1.inputs + enc2.inputs), (w1, w2), z),
    )


def check_orthogonal(spec: SystemSpec) -> RegionReport:
    """Check a system whose channel splits into ``p(y1|x1) p(y2|x2)``.

    Right-hand sides are ``I(X1;Y1)``, ``I(X2;Y2)`` and their sum, which is
    what independent channel inputs achieve. ``report.exact`` is true when
    the conditions are also necessary: ``W_i = U_i``, lossless distortion
    measures, discrete alphabets.
    """
    if len(spec.channel) != 2:
        raise NotOrthogonal("orthogonal check needs one kernel per user, got a single joint channel")
    by_input = {}
    for k in spec.channel:
        if len(k.inputs) != 1 or k.inputs[0] not in (spec.x1, spec.x2):
            raise NotOrthogonal(f"channel kernel {k.output!r} depends on {k.inputs}")
        by_input[k.inputs[0]] = k
    if set(by_input) != {spec.x1, spec.x2}:
        raise NotOrthogonal("both users need their own channel kernel")
    j = spec.joint()
    y1, y2 = by_input[spec.x1].output, by_input[spec.x2].output
    c1 = mutual_info(j, spec.x1, y1)
    c2 = mutual_info(j, spec.x2, y2)
    s1 = (spec.u1,) + spec.z1
    s2 = (spec.u2,) + spec.z2
    rows = [
        RegionRow("I(U1,Z1;W1|W2,Z) < I(X1;Y1)", _cmi(j, s1, (spec.w1,), (spec.w2,) + spec.z), c1),
        RegionRow("I(U2,Z2;W2|W1,Z) < I(X2;Y2)", _cmi(j, s2, (spec.w2,), (spec.w1,) + spec.z), c2),
        RegionRow("I(U1,U2,Z1,Z2;W1,W2|Z) < I(X1;Y1)+I(X2;Y2)", _cmi(j, s1 + s2, (spec.w1, spec.w2), spec.z), c1 + c2),
    ]
    uh1, uh2 = spec.uhat
    dist = _distortion_rows(j, [(spec.u1, uh1, spec.d1, spec.D1), (spec.u2, uh2, spec.d2, spec.D2)])
    exact = (
        _is_identity_encoder(spec.enc1, spec.u1, spec.source)
        and _is_identity_encoder(spec.enc2, spec.u2, spec.source)
        and spec.d1.lossless
        and spec.d2.lossless
    )
    return RegionReport(rows, dist, exact=exact, title="orthogonal MAC with side information")


def _is_identity_encoder(k: DiscreteKernel, u: str, source: JointPmf) -> bool:
    """True when the kernel copies ``u`` (possibly ignoring other inputs)."""
    if u not in k.inputs or k.size != source.size(u):
        return False
    ax = k.inputs.index(u)
    t = np.moveaxis(k.table, ax, 0)
    eye = np.eye(k.size).reshape((k.size,) + (1,) * (t.ndim - 2) + (k.size,))
    return bool(np.allclose(t, np.broadcast_to(eye, t.shape)))


def check_compound(specs: Sequence[SystemSpec]) -> tuple[bool, list[RegionReport]]:
    """Compound MAC: every decoder must recover both sources."""
    reports = [check_theorem1(s) for s in specs]
    return all(r.verdict for r in reports), reports


# -- special-case builders ----------------------------------------------------------


def _require(params: dict, *keys):
    missing = [k for k in keys if k not in params]
    if missing:
        raise MissingParam(f"missing parameters: {', '.join(missing)}")


def _source2(params) -> JointPmf:
    src = params["source"]
    if isinstance(src, JointPmf):
        return src
    table = np.asarray(src, dtype=float)
    return make_joint([("U1", table.shape[0]), ("U2", table.shape[1])], table)


def _chin(k, w: str, x: str, w_size: int) -> DiscreteKernel:
    """Accept a kernel (any input name) or a raw ``p(x|w)`` table."""
    if isinstance(k, DiscreteKernel):
        if len(k.inputs) != 1:
            raise ShapeMismatch("channel-input kernel must have a single input")
        return DiscreteKernel((w,), x, k.table)
    table = np.asarray(k, dtype=float)
    if table.shape[0] != w_size:
        raise AlphabetMismatch(f"p(x|w) has {table.shape[0]} rows for alphabet {w_size}")
    return DiscreteKernel((w,), x, table)


def _channel(k, x1="X1", x2="X2", y="Y") -> DiscreteKernel:
    if isinstance(k, DiscreteKernel):
        return DiscreteKernel((x1, x2), y, k.table)
    return DiscreteKernel((x1, x2), y, np.asarray(k, dtype=float))


def _lossless_system(src: JointPmf, u1: str, u2: str, params: dict, z=(), z1=(), z2=()) -> SystemSpec:
    s1, s2 = src.size(u1), src.size(u2)
    enc1 = identity_kernel(u1, s1, "W1")
    enc2 = identity_kernel(u2, s2, "W2")
    chin1 = _chin(params["chin1"], "W1", "X1", s1)
    chin2 = _chin(params["chin2"], "W2", "X2", s2)
    z_sizes = tuple((n, src.size(n)) for n in z)
    dec = Decoder.identity((("W1", s1), ("W2", s2)), z_sizes)
    return SystemSpec(
        source=src, u1=u1, u2=u2, z1=z1, z2=z2, z=z,
        enc1=enc1, enc2=enc2, chin1=chin1, chin2=chin2,
        channel=_channel(params["channel"]), decoder=dec,
    )


def build_special_case(case: str, **params):
    """Configure a :class:`SystemSpec` for one of the classical special cases.

    Cases and their parameters:

    ``cover80``
        lossless correlated sources, no side information, ``W = U``.
        ``source`` (2-D table or pmf over two variables), ``chin1``, ``chin2``
        (``p(x|u)`` tables or kernels), ``channel`` (kernel or table over
        ``(x1, x2, y)``).
    ``lossy``
        no side information, user-supplied quantizers. Adds ``enc1``,
        ``enc2`` (``p(w|u)`` tables), optional ``decoder``, ``d1``, ``d2``,
        ``D1``, ``D2``. Without a decoder the distortion-optimal one is used.
    ``common_info``
        ``U_i = (U_i', U_0')`` with independent parts. ``p_private1``,
        ``p_private2``, ``p_common`` (1-D pmfs), ``chin1``, ``chin2`` (rows
        indexed by ``u' * |U0'| + u0``), ``channel``.
    ``receiver_side``
        ``source`` pmf over ``U1, U2`` and decoder side information named by
        ``z``; ``W = U``.
    ``mixed_si``
        ``source`` pmf over ``X, Y, Z`` (encoder sees ``Y``; decoder sees
        ``Y, Z``), ``test_channel`` ``p(w|x,y)``, ``decoder`` callable
        ``(w, y, z) -> xhat``, ``distortion``, ``D``, ``rate_alphabet``
        (noiseless link of ``log2(rate_alphabet)`` bits).
    ``compound``
        ``source`` pmf over ``U1, U2`` and the decoder side information names
        ``zd1``, ``zd2``; ``chin1``, ``chin2``, ``channel1``, ``channel2``.
        Returns a pair of specs, one per receiver.
    """
    if case == "cover80":
        _require(params, "source", "chin1", "chin2", "channel")
        src = _source2(params)
        u1, u2 = src.names
        return _lossless_system(src, u1, u2, params)

    if case == "lossy":
        _require(params, "source", "enc1", "enc2", "chin1", "chin2", "channel")
        src = _source2(params)
        u1, u2 = src.names
        e1 = np.asarray(params["enc1"].table if isinstance(params["enc1"], DiscreteKernel) else params["enc1"])
        e2 = np.asarray(params["enc2"].table if isinstance(params["enc2"], DiscreteKernel) else params["enc2"])
        enc1 = DiscreteKernel((u1,), "W1", e1)
        enc2 = DiscreteKernel((u2,), "W2", e2)
        chin1 = _chin(params["chin1"], "W1", "X1", enc1.size)
        chin2 = _chin(params["chin2"], "W2", "X2", enc2.size)
        d1 = params.get("d1") or DistortionMeasure.hamming(src.size(u1))
        d2 = params.get("d2") or DistortionMeasure.hamming(src.size(u2))
        decoder = params.get("decoder")
        if decoder is None:
            j = attach_kernel(attach_kernel(src, enc1), enc2)
            decoder = optimal_decoder(j, ("W1", "W2"), [(u1, d1), (u2, d2)], names=("U1hat", "U2hat"))
        return SystemSpec(
            source=src, u1=u1, u2=u2, enc1=enc1, enc2=enc2, chin1=chin1, chin2=chin2,
            channel=_channel(params["channel"]), decoder=decoder,
            d1=d1, d2=d2, D1=float(params.get("D1", 0.0)), D2=float(params.get("D2", 0.0)),
        )

    if case == "common_info":
        _require(params, "p_private1", "p_private2", "p_common", "chin1", "chin2", "channel")
        a = np.asarray(params["p_private1"], dtype=float)
        b = np.asarray(params["p_private2"], dtype=float)
        c = np.asarray(params["p_common"], dtype=float)
        na, nb, nc = len(a), len(b), len(c)
        # U1 = (U1', U0') and U2 = (U2', U0') flattened row-major
        table = np.zeros((na * nc, nb * nc))
        for i, k, m in itertools.product(range(na), range(nb), range(nc)):
            table[i * nc + m, k * nc + m] = a[i] * b[k] * c[m]
        src = make_joint([("U1", na * nc), ("U2", nb * nc)], table)
        return _lossless_system(src, "U1", "U2", params)

    if case == "receiver_side":
        _require(params, "source", "z", "chin1", "chin2", "channel")
        src = params["source"]
        z = _names(params["z"])
        u1, u2 = params.get("u1", "U1"), params.get("u2", "U2")
        return _lossless_system(src, u1, u2, params, z=z)

    if case == "mixed_si":
        _require(params, "source", "test_channel", "decoder", "D", "rate_alphabet")
        src = params["source"]  # over X, Y, Z
        for n in ("X", "Y", "Z"):
            src.axis(n)
        const = make_joint([("U2", 1)], [1.0])
        full = product(src, const)
        sx, sy, sz = src.size("X"), src.size("Y"), src.size("Z")
        tc = np.asarray(params["test_channel"], dtype=float)  # (x, y, w)
        enc1 = DiscreteKernel(("X", "Y"), "W1", tc)
        enc2 = constant_kernel([("U2", 1)], "W2")
        k = int(params["rate_alphabet"])
        chin1 = uniform_kernel([("W1", enc1.size)], "X1", k)
        chin2 = constant_kernel([("W2", 1)], "X2")
        channel = deterministic_kernel([("X1", k), ("X2", 1)], "Y_ch", k, lambda a, b: a)
        fn = params["decoder"]
        decoder = Decoder.from_function(
            (("W1", enc1.size), ("W2", 1), ("Y", sy), ("Z", sz)),
            (("U1hat", sx), ("U2hat", 1)),
            lambda w, _w2, y, z: (fn(w, y, z), 0),
        )
        d = params.get("distortion") or DistortionMeasure.hamming(sx)
        return SystemSpec(
            source=full, u1="X", u2="U2", z1=("Y",), z2=(), z=("Z", "Y"),
            enc1=enc1, enc2=enc2, chin1=chin1, chin2=chin2, channel=channel, decoder=decoder,
            d1=d, d2=DistortionMeasure(np.zeros((1, 1))), D1=float(params["D"]), D2=0.0,
        )

    if case == "compound":
        _require(params, "source", "zd1", "zd2", "chin1", "chin2", "channel1", "channel2")
        src = params["source"]
        u1, u2 = params.get("u1", "U1"), params.get("u2", "U2")
        specs = []
        for zd, ch in ((params["zd1"], params["channel1"]), (params["zd2"], params["channel2"])):
            p = dict(params, channel=ch)
            specs.append(_lossless_system(src, u1, u2, p, z=_names(zd)))
        return tuple(specs)

    raise MissingParam(f"unknown special case {case!r}")


# -- rate-distortion helpers -----------------------------------------------------


def binary_rate_distortion(p: float, D: float) -> float:
    """``R(D) = h(p) - h(D)`` for a Bernoulli(p) source under Hamming loss."""
    from .pmf import binary_entropy

    if D >= min(p, 1 - p):
        return 0.0
    return binary_entropy(p) - binary_entropy(D)


def _simplex_grid(k: int, steps: int) -> np.ndarray:
    """All points of the ``k``-simplex with coordinates in multiples of ``1/steps``."""
    pts = [c for c in itertools.product(range(steps + 1), repeat=k - 1) if sum(c) <= steps]
    arr = np.array([list(c) + [steps - sum(c)] for c in pts], dtype=float)
    return arr / steps


def wyner_ziv_rate(
    joint: JointPmf,
    u: str,
    z: Sequence[str],
    d: DistortionMeasure,
    D: float,
    w_sizes=(2, 3),
    steps: dict | None = None,
) -> tuple[float, np.ndarray]:
    """Grid search for the Wyner-Ziv rate ``min I(U;W|Z)`` with ``E d <= D``.

    The test channel ``p(w|u)`` ranges over a simplex grid for each
    auxiliary alphabet size in ``w_sizes``; the decoder ``uhat(w, z)`` is the
    distortion-optimal one. Returns the best rate and its test channel.
    """
    z = _names(z)
    steps = steps or {2: 200, 3: 24}
    pz = joint.marginal((u,) + z).probs.reshape(joint.size(u), -1)  # p(u, z)
    nu = pz.shape[0]
    best, best_q = np.inf, None
    for m in w_sizes:
        grid = _simplex_grid(m, steps.get(m, 20))
        # every combination of one grid row per source symbol
        idx = np.array(list(itertools.product(range(len(grid)), repeat=nu)))
        for chunk in np.array_split(idx, max(1, len(idx) // 20000)):
            Q = grid[chunk]  # (B, nu, m) = p(w|u)
            puzw = pz[None, :, :, None] * Q[:, :, None, :]  # (B, u, z, w)
            # optimal decoder: for each (z, w) pick uhat minimizing sum_u p d
            cost = np.einsum("buzw,uv->bzwv", puzw, d.table)
            dist = cost.min(axis=-1).sum(axis=(1, 2))
            ok = dist <= D + 1e-12
            if not ok.any():
                continue
            P = puzw[ok]
            rate = _cmi_array(P)
            i = int(np.argmin(rate))
            if rate[i] < best:
                best, best_q = float(rate[i]), chunk[ok][i]
                best_Q = Q[ok][i]
    if best_q is None:
        return np.inf, None
    return best, best_Q


def _cmi_array(P: np.ndarray) -> np.ndarray:
    """``I(U;W|Z)`` in bits for a batch of tables shaped ``(B, u, z, w)``."""

    def H(t, axes):
        m = t.sum(axis=axes) if axes else t
        m = m.reshape(m.shape[0], -1)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -np.where(m > 0, m * np.log2(m), 0.0).sum(axis=1)

    return H(P, (3,)) + H(P, (1,)) - H(P, ()) - H(P, (1, 3))
