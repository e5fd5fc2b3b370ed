"""Exact arithmetic over finite joint distributions.

A :class:`JointPmf` is a dense probability table over an ordered list of
named discrete variables. Kernels (conditional tables) are attached with
:func:`attach_kernel`, and information quantities are read off with
:func:`entropy` and :func:`mutual_info`. All information is in bits.

Conventions: ``0 log 0 = 0``; conditioning cells of probability zero
contribute nothing.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .exceptions import (
    AlphabetMismatch,
    NameCollision,
    NegativeProbability,
    NotNormalized,
    OverlappingSets,
    ShapeMismatch,
    UnknownVariable,
)

NORM_TOL = 1e-9


def _as_names(names) -> tuple[str, ...]:
    if names is None:
        return ()
    if isinstance(names, str):
        return (names,)
    return tuple(names)


def _check_table(table: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(table)):
        raise NegativeProbability(f"{what} contains non-finite entries")
    if np.any(table < 0):
        raise NegativeProbability(f"{what} has negative entries (min {table.min():.3g})")


@dataclass(frozen=True)
class JointPmf:
    """Joint probability mass function over named variables.

    Parameters
    ----------
    names : tuple of str
        Variable names, in axis order.
    probs : ndarray
        Probability table; ``probs.shape[i]`` is the alphabet size of
        ``names[i]``.
    """

    names: tuple[str, ...]
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        names = tuple(self.names)
        if len(set(names)) != len(names):
            raise NameCollision(f"duplicate variable names in {names}")
        if probs.ndim != len(names):
            raise ShapeMismatch(f"table has {probs.ndim} axes for {len(names)} variables")
        _check_table(probs, "pmf")
        total = probs.sum()
        if abs(total - 1.0) > NORM_TOL:
            raise NotNormalized(f"pmf sums to {total!r}")
        probs = probs.copy()
        probs.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "probs", probs)

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.probs.shape

    @property
    def variables(self) -> list[tuple[str, int]]:
        return list(zip(self.names, self.sizes))

    def size(self, name: str) -> int:
        return self.sizes[self.axis(name)]

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariable(f"unknown variable {name!r}; have {self.names}") from None

    def __contains__(self, name) -> bool:
        return name in self.names

    def marginal(self, names) -> JointPmf:
        """Marginal over ``names``, kept in the requested order."""
        names = _as_names(names)
        axes = [self.axis(n) for n in names]
        if len(set(axes)) != len(axes):
            raise NameCollision(f"duplicate names in {names}")
        drop = tuple(i for i in range(len(self.names)) if i not in axes)
        table = self.probs.sum(axis=drop) if drop else self.probs
        # remaining axes are in ascending original order; permute to request order
        kept = sorted(axes)
        table = np.transpose(table, [kept.index(a) for a in axes]) if axes else np.asarray(table)
        return JointPmf(names, table)

    def rename(self, mapping: dict[str, str]) -> JointPmf:
        return JointPmf(tuple(mapping.get(n, n) for n in self.names), self.probs)

    def to_dict(self) -> dict:
        return {
            "variables": [{"name": n, "size": int(s)} for n, s in self.variables],
            "probs": self.probs.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> JointPmf:
        variables = [(v["name"], int(v["size"])) for v in d["variables"]]
        return make_joint(variables, d["probs"])


@dataclass(frozen=True)
class DiscreteKernel:
    """Row-stochastic conditional table ``p(output | inputs)``.

    ``table`` has one axis per input (in ``inputs`` order) followed by the
    output axis.
    """

    inputs: tuple[str, ...]
    output: str
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        inputs = _as_names(self.inputs)
        table = np.asarray(self.table, dtype=float)
        if table.ndim != len(inputs) + 1:
            raise ShapeMismatch(
                f"kernel table has {table.ndim} axes; expected {len(inputs) + 1}"
            )
        if self.output in inputs:
            raise NameCollision(f"kernel output {self.output!r} is also an input")
        if len(set(inputs)) != len(inputs):
            raise NameCollision(f"duplicate kernel inputs {inputs}")
        _check_table(table, f"kernel {self.output!r}")
        rows = table.sum(axis=-1)
        if np.any(np.abs(rows - 1.0) > NORM_TOL):
            raise NotNormalized(f"kernel {self.output!r} rows do not sum to 1")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "table", table)

    @property
    def input_sizes(self) -> tuple[int, ...]:
        return self.table.shape[:-1]

    @property
    def size(self) -> int:
        return self.table.shape[-1]

    @property
    def is_deterministic(self) -> bool:
        return bool(np.all((self.table == 0) | (self.table == 1)))

    def rename(self, mapping: dict[str, str]) -> DiscreteKernel:
        return DiscreteKernel(
            tuple(mapping.get(n, n) for n in self.inputs),
            mapping.get(self.output, self.output),
            self.table,
        )

    def to_dict(self) -> dict:
        return {
            "inputs": [{"name": n, "size": int(s)} for n, s in zip(self.inputs, self.input_sizes)],
            "output": {"name": self.output, "size": int(self.size)},
            "probs": self.table.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> DiscreteKernel:
        inputs = [(v["name"], int(v["size"])) for v in d["inputs"]]
        out = d["output"]
        shape = tuple(s for _, s in inputs) + (int(out["size"]),)
        table = np.asarray(d["probs"], dtype=float)
        if table.size != int(np.prod(shape)):
            raise ShapeMismatch(f"kernel {out['name']!r}: {table.size} entries for shape {shape}")
        return cls(tuple(n for n, _ in inputs), out["name"], table.reshape(shape))


@dataclass(frozen=True)
class DistortionMeasure:
    """Per-letter distortion ``d(u, uhat)``; rows index ``u``."""

    table: np.ndarray = field(repr=False)
    lossless: bool = False

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        if table.ndim != 2:
            raise ShapeMismatch("distortion table must be 2-D")
        if np.any(table < 0) or not np.all(np.isfinite(table)):
            raise NegativeProbability("distortion values must be finite and non-negative")
        if self.lossless:
            k, m = table.shape
            eye = np.zeros_like(table, dtype=bool)
            eye[np.arange(min(k, m)), np.arange(min(k, m))] = True
            if k != m or np.any((table == 0) != eye):
                raise AlphabetMismatch("lossless measure needs d(u, v) = 0 exactly when u == v")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def hamming(cls, k: int) -> DistortionMeasure:
        return cls(1.0 - np.eye(k), lossless=True)

    @property
    def max(self) -> float:
        return float(self.table.max())


def make_joint(variables: Sequence[tuple[str, int]], table) -> JointPmf:
    """Build a validated :class:`JointPmf`.

    ``table`` may be flat (row-major over ``variables``) or already shaped.

    Examples
    --------
    >>> p = make_joint([("U1", 2), ("U2", 2)], [1/3, 1/6, 1/6, 1/3])
    >>> p.sizes
    (2, 2)
    """
    names = tuple(n for n, _ in variables)
    shape = tuple(int(s) for _, s in variables)
    if any(s < 1 for s in shape):
        raise ShapeMismatch(f"alphabet sizes must be >= 1, got {shape}")
    arr = np.asarray(table, dtype=float)
    if arr.size != int(np.prod(shape)):
        raise ShapeMismatch(f"table has {arr.size} entries; product alphabet has {int(np.prod(shape))}")
    if arr.shape != shape:
        arr = arr.reshape(shape)
    return JointPmf(names, arr)


def point_mass(variables: Sequence[tuple[str, int]], cell: Sequence[int]) -> JointPmf:
    shape = tuple(s for _, s in variables)
    table = np.zeros(shape)
    table[tuple(cell)] = 1.0
    return make_joint(variables, table)


def product(*pmfs: JointPmf) -> JointPmf:
    """Joint of independent pmfs over disjoint variable sets."""
    names: tuple[str, ...] = ()
    table = np.ones(())
    for p in pmfs:
        if set(names) & set(p.names):
            raise NameCollision(f"variables {set(names) & set(p.names)} appear twice")
        names += p.names
        table = np.multiply.outer(table, p.probs)
    return JointPmf(names, table)


def attach_kernel(pmf: JointPmf, k: DiscreteKernel) -> JointPmf:
    """Extend ``pmf`` with a new variable drawn from ``k`` given its inputs.

    The new variable is appended as the last axis. The marginal over the
    existing variables is unchanged.
    """
    for n in k.inputs:
        if n not in pmf.names:
            raise UnknownVariable(f"kernel input {n!r} not in pmf {pmf.names}")
    if k.output in pmf.names:
        raise NameCollision(f"variable {k.output!r} already exists")
    for n, s in zip(k.inputs, k.input_sizes):
        if pmf.size(n) != s:
            raise AlphabetMismatch(f"{n!r} has size {pmf.size(n)} in pmf but {s} in kernel")
    # reorder kernel input axes to follow pmf axis order, then broadcast
    order = sorted(range(len(k.inputs)), key=lambda i: pmf.axis(k.inputs[i]))
    kt = np.transpose(k.table, order + [len(k.inputs)])
    shape = [1] * len(pmf.names) + [k.size]
    for i in order:
        shape[pmf.axis(k.inputs[i])] = k.input_sizes[i]
    table = pmf.probs[..., None] * kt.reshape(shape)
    return JointPmf(pmf.names + (k.output,), table)


def attach_kernels(pmf: JointPmf, kernels: Iterable[DiscreteKernel]) -> JointPmf:
    for k in kernels:
        pmf = attach_kernel(pmf, k)
    return pmf


def _plogp_sum(table: np.ndarray) -> float:
    p = table[table > 0]
    return float(-(p * np.log2(p)).sum())


def _joint_entropy(pmf: JointPmf, names: tuple[str, ...]) -> float:
    if not names:
        return 0.0
    axes = {pmf.axis(n) for n in names}
    drop = tuple(i for i in range(len(pmf.names)) if i not in axes)
    return _plogp_sum(pmf.probs.sum(axis=drop) if drop else pmf.probs)


def _check_disjoint(pmf: JointPmf, *sets: tuple[str, ...]) -> None:
    seen: set[str] = set()
    for s in sets:
        for n in s:
            pmf.axis(n)
        if len(set(s)) != len(s):
            raise OverlappingSets(f"repeated variable in {s}")
        if seen & set(s):
            raise OverlappingSets(f"variables {sorted(seen & set(s))} appear in more than one set")
        seen |= set(s)


def entropy(pmf: JointPmf, A, given=()) -> float:
    """Conditional entropy ``H(A | given)`` in bits."""
    A, B = _as_names(A), _as_names(given)
    _check_disjoint(pmf, A, B)
    return _joint_entropy(pmf, A + B) - _joint_entropy(pmf, B)


def mutual_info(pmf: JointPmf, A, B, given=()) -> float:
    """Conditional mutual information ``I(A; B | given)`` in bits."""
    A, B, C = _as_names(A), _as_names(B), _as_names(given)
    _check_disjoint(pmf, A, B, C)
    return (
        _joint_entropy(pmf, A + C)
        + _joint_entropy(pmf, B + C)
        - _joint_entropy(pmf, A + B + C)
        - _joint_entropy(pmf, C)
    )


def expected_distortion(pmf: JointPmf, u: str, uhat: str, d: DistortionMeasure) -> float:
    """``E[d(U, Uhat)]`` under ``pmf``."""
    pair = pmf.marginal((u, uhat)).probs
    if pair.shape != d.table.shape:
        raise AlphabetMismatch(f"pair alphabet {pair.shape} vs distortion table {d.table.shape}")
    return float((pair * d.table).sum())


# -- kernel constructors ------------------------------------------------------


def deterministic_kernel(
    inputs: Sequence[tuple[str, int]],
    output: str,
    size: int,
    fn: Callable[..., int],
) -> DiscreteKernel:
    """Kernel putting all mass on ``fn(*input_symbols)``."""
    names = tuple(n for n, _ in inputs)
    shape = tuple(s for _, s in inputs)
    table = np.zeros(shape + (size,))
    for cell in itertools.product(*(range(s) for s in shape)):
        out = int(fn(*cell))
        if not 0 <= out < size:
            raise AlphabetMismatch(f"function value {out} outside alphabet of size {size}")
        table[cell + (out,)] = 1.0
    return DiscreteKernel(names, output, table)


def identity_kernel(name: str, size: int, output: str) -> DiscreteKernel:
    return DiscreteKernel((name,), output, np.eye(size))


def bsc_kernel(name: str, output: str, p: float) -> DiscreteKernel:
    """Binary symmetric channel with crossover ``p``."""
    return DiscreteKernel((name,), output, np.array([[1 - p, p], [p, 1 - p]]))


def uniform_kernel(inputs: Sequence[tuple[str, int]], output: str, size: int) -> DiscreteKernel:
    """Output uniform on ``size`` symbols and independent of the inputs."""
    shape = tuple(s for _, s in inputs) + (size,)
    return DiscreteKernel(tuple(n for n, _ in inputs), output, np.full(shape, 1.0 / size))


def constant_kernel(inputs: Sequence[tuple[str, int]], output: str) -> DiscreteKernel:
    return uniform_kernel(inputs, output, 1)


def binary_entropy(p: float) -> float:
    p = float(p)
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))
