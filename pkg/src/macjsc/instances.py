"""Ready-made sources, channels and systems used by tests, the CLI and docs."""
import numpy as np

from .pmf import (
    DiscreteKernel,
    JointPmf,
    attach_kernel,
    bsc_kernel,
    deterministic_kernel,
    identity_kernel,
    make_joint,
    uniform_kernel,
)
from .region import Decoder, SystemSpec


def binary_pair(p_same: float = 1 / 3, p_diff: float = 1 / 6) -> JointPmf:
    """Symmetric binary pair with ``P(00)=P(11)=p_same``, ``P(01)=P(10)=p_diff``."""
    return make_joint([("U1", 2), ("U2", 2)], [[p_same, p_diff], [p_diff, p_same]])


def asymmetric_pair() -> JointPmf:
    """``P(00)=P(01)=P(11)=1/3`` and ``P(10)=0``."""
    return make_joint([("U1", 2), ("U2", 2)], [[1 / 3, 1 / 3], [0.0, 1 / 3]])


def side_info_source(flip: float = 0.3) -> JointPmf:
    """Binary pair with three side-information variables.

    ``Z1`` is ``U2`` through a BSC(flip), ``Z2`` is ``U1`` through a
    BSC(flip) and ``V = U1 AND U2 AND N`` with ``N`` a fair bit.
    """
    j = binary_pair()
    j = attach_kernel(j, bsc_kernel("U2", "Z1", flip))
    j = attach_kernel(j, bsc_kernel("U1", "Z2", flip))
    v = np.zeros((2, 2, 2))
    v[:, :, 0] = 1.0
    v[1, 1] = [0.5, 0.5]
    return attach_kernel(j, DiscreteKernel(("U1", "U2"), "V", v))


def adder_channel(x1="X1", x2="X2", y="Y") -> DiscreteKernel:
    """Noiseless binary adder ``Y = X1 + X2`` with ternary output."""
    return deterministic_kernel([(x1, 2), (x2, 2)], y, 3, lambda a, b: a + b)


def lossless_adder_system(z=(), independent_inputs: bool = True, source: JointPmf | None = None) -> SystemSpec:
    """``W = U`` over the adder MAC with decoder side information ``z``.

    With ``independent_inputs`` the channel inputs are fair bits independent
    of everything else; otherwise ``X = U``.
    """
    src = source if source is not None else side_info_source()
    enc1 = identity_kernel("U1", 2, "W1")
    enc2 = identity_kernel("U2", 2, "W2")
    if independent_inputs:
        chin1 = uniform_kernel([("W1", 2)], "X1", 2)
        chin2 = uniform_kernel([("W2", 2)], "X2", 2)
    else:
        chin1 = identity_kernel("W1", 2, "X1")
        chin2 = identity_kernel("W2", 2, "X2")
    z = tuple(z)
    dec = Decoder.identity((("W1", 2), ("W2", 2)), tuple((n, src.size(n)) for n in z))
    return SystemSpec(
        source=src, u1="U1", u2="U2", z=z,
        enc1=enc1, enc2=enc2, chin1=chin1, chin2=chin2,
        channel=adder_channel(), decoder=dec,
    )


def noiseless_pair_channel(k: int = 4) -> DiscreteKernel:
    """Perfect channel whose output reveals both inputs, ``Y = k * X1 + X2``."""
    return deterministic_kernel([("X1", k), ("X2", k)], "Y", k * k, lambda a, b: k * a + b)


def lossless_random_input_system(source: JointPmf | None = None, k: int = 4) -> SystemSpec:
    """``W = U`` with channel inputs uniform on ``k`` symbols, independent of ``W``.

    The noiseless channel carries ``log2(k)`` bits per user per use, leaving
    a wide margin for the binary pair source.
    """
    src = source if source is not None else binary_pair()
    s1, s2 = src.sizes[:2]
    u1, u2 = src.names[:2]
    return SystemSpec(
        source=src, u1=u1, u2=u2,
        enc1=identity_kernel(u1, s1, "W1"),
        enc2=identity_kernel(u2, s2, "W2"),
        chin1=uniform_kernel([("W1", s1)], "X1", k),
        chin2=uniform_kernel([("W2", s2)], "X2", k),
        channel=noiseless_pair_channel(k),
        decoder=Decoder.identity((("W1", s1), ("W2", s2))),
    )
