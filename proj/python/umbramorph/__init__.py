"""Exact grey-value morphology through FFT convolution of umbra volumes."""

from ._core import (
    ParseError,
    PrecisionError,
    beucher_gradient,
    closing,
    conv_full,
    dilate,
    erode,
    maxplus_sum_of_products,
    opening,
    read_pgm,
    umbra,
)

__all__ = [
    "ParseError",
    "PrecisionError",
    "beucher_gradient",
    "closing",
    "conv_full",
    "dilate",
    "erode",
    "maxplus_sum_of_products",
    "opening",
    "read_pgm",
    "umbra",
]
