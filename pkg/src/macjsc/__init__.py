"""Joint source-channel coding over multiple access channels with side information."""
from .exceptions import MacjscError
from .pmf import (
    DiscreteKernel,
    DistortionMeasure,
    JointPmf,
    attach_kernel,
    attach_kernels,
    binary_entropy,
    entropy,
    expected_distortion,
    make_joint,
    mutual_info,
    point_mass,
    product,
)

__version__ = "0.1.0"

__all__ = [
    "DiscreteKernel",
    "DistortionMeasure",
    "JointPmf",
    "MacjscError",
    "attach_kernel",
    "attach_kernels",
    "binary_entropy",
    "entropy",
    "expected_distortion",
    "make_joint",
    "mutual_info",
    "point_mass",
    "product",
]
