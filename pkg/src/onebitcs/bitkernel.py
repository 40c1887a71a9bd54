"""Bit-packed representation and XOR/popcount arithmetic for binary complex
data (values in scale*{+-1 +- 1j}).

Encoding: one sign bit per real part and one per imaginary part, bit 1 <-> -1
so that XOR of two sign planes counts disagreements and a sum of +-1 products
reduces to m - 2*popcount(xor).  The adjoint multiply is exact: outputs are
scale_A * scale_z times Gaussian integers, accumulated in wide integers and
converted to floating point only at the final scaling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class OffGridError(ValueError):
    """Entry is not exactly +-scale +- 1j*scale; packing would be lossy."""


def _sign_planes(values: np.ndarray, scale: float):
    """Split into sign bit arrays (1 <-> negative); reject off-grid entries."""
    re, im = values.real, values.imag
    if not (np.all(np.abs(re) == scale) and np.all(np.abs(im) == scale)):
        raise OffGridError(
            "entries must have real and imaginary parts exactly +-scale; "
            "check the upstream resolution rule")
    return (re < 0), (im < 0)


def _pack(bits: np.ndarray) -> np.ndarray:
    # rows padded to a byte boundary with zero bits
    return np.packbits(bits, axis=-1)


def _unpack(packed: np.ndarray, count: int) -> np.ndarray:
    return np.unpackbits(packed, axis=-1, count=count).astype(bool)


@dataclass(frozen=True)
class BinaryMatrix:
    """m x N binary complex matrix, packed along the measurement axis.

    Bit-planes are stored transposed (one packed length-m row per signal
    component) so the adjoint multiply streams over contiguous words.
    """

    m: int
    n: int
    scale: float
    re_bits: np.ndarray  # (N, ceil(m/8)) uint8, sign of Re of column i
    im_bits: np.ndarray


@dataclass(frozen=True)
class BinaryVector:
    m: int
    scale: float
    re_bits: np.ndarray  # (ceil(m/8),) uint8
    im_bits: np.ndarray


def pack_matrix(psi: np.ndarray, scale: float) -> BinaryMatrix:
    """Pack a matrix with entries in scale*{+-1 +- 1j}; lossless."""
    psi = np.asarray(psi, dtype=complex)
    m, n = psi.shape
    re_neg, im_neg = _sign_planes(psi.T, scale)
    return BinaryMatrix(m=m, n=n, scale=float(scale),
                        re_bits=_pack(re_neg), im_bits=_pack(im_neg))


def pack_vector(z: np.ndarray, scale: float) -> BinaryVector:
    z = np.asarray(z, dtype=complex)
    re_neg, im_neg = _sign_planes(z, scale)
    return BinaryVector(m=len(z), scale=float(scale),
                        re_bits=_pack(re_neg), im_bits=_pack(im_neg))


def unpack_matrix(b: BinaryMatrix) -> np.ndarray:
    re = np.where(_unpack(b.re_bits, b.m), -1.0, 1.0)
    im = np.where(_unpack(b.im_bits, b.m), -1.0, 1.0)
    return b.scale * (re + 1j * im).T


def unpack_vector(b: BinaryVector) -> np.ndarray:
    re = np.where(_unpack(b.re_bits, b.m), -1.0, 1.0)
    im = np.where(_unpack(b.im_bits, b.m), -1.0, 1.0)
    return b.scale * (re + 1j * im)


def _xor_popcount(planes: np.ndarray, zplane: np.ndarray) -> np.ndarray:
    """Row-wise popcount of planes XOR zplane; padding bits cancel in the XOR."""
    return np.bitwise_count(planes ^ zplane).sum(axis=-1, dtype=np.int64)


def binary_adjoint_multiply(a: BinaryMatrix, z: BinaryVector) -> np.ndarray:
    """Exact Psi^H z via XOR + popcount on sign planes.

    With conj(p + qj)(c + dj) = (pc + qd) + (pd - qc)j and all factors in
    {+-1}, each correlation sum is m - 2*popcount(xor of the sign planes).
    """
    if a.m != z.m:
        raise ValueError(f"length mismatch: matrix m={a.m}, vector m={z.m}")
    rr = _xor_popcount(a.re_bits, z.re_bits)  # disagreements of Re(Psi), Re(z)
    ii = _xor_popcount(a.im_bits, z.im_bits)
    ri = _xor_popcount(a.re_bits, z.im_bits)
    ir = _xor_popcount(a.im_bits, z.re_bits)
    real = 2 * a.m - 2 * (rr + ii)   # sum pc + sum qd
    imag = 2 * (ir - ri)             # sum pd - sum qc
    return (a.scale * z.scale) * (real + 1j * imag)


def binary_adjoint_multiply_masked(a: BinaryMatrix, z: BinaryVector,
                                   support) -> np.ndarray:
    """As binary_adjoint_multiply, computing only the listed components."""
    if a.m != z.m:
        raise ValueError(f"length mismatch: matrix m={a.m}, vector m={z.m}")
    support = np.asarray(support, dtype=int)
    out = np.zeros(a.n, dtype=complex)
    if support.size == 0:
        return out
    if support.min() < 0 or support.max() >= a.n:
        raise IndexError("support index out of range")
    rr = _xor_popcount(a.re_bits[support], z.re_bits)
    ii = _xor_popcount(a.im_bits[support], z.im_bits)
    ri = _xor_popcount(a.re_bits[support], z.im_bits)
    ir = _xor_popcount(a.im_bits[support], z.re_bits)
    out[support] = (a.scale * z.scale) * (2 * a.m - 2 * (rr + ii)
                                          + 2j * (ir - ri))
    return out
