"""Dithered uniform scalar quantization of real scalars and complex arrays.

The quantizer maps u to floor((u + dither)/alpha)*alpha + alpha/2, so outputs
always sit on the mid-rise grid alpha*Z + alpha/2.  When every real/imaginary
part of the input is bounded by alpha/2, the output is binary per component,
i.e. in (alpha/2)*{+-1 +- 1j}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class QuantizerConfigError(ValueError):
    """Raised for invalid quantizer configuration (e.g. resolution <= 0)."""


@dataclass(frozen=True)
class FreshUniform:
    """Draw an independent uniform dither in [-alpha/2, alpha/2] per component.

    The dither stream is a deterministic function of (seed, array shape):
    a counter-based Philox generator keyed on the seed produces one dither
    per real and per imaginary part, so results are reproducible under any
    evaluation order.
    """

    seed: int


@dataclass(frozen=True)
class NoDither:
    """Dither identically zero (deterministic quantizer, ablation only)."""


DitherPolicy = FreshUniform | NoDither


@dataclass(frozen=True)
class UniformQuantizer:
    resolution: float
    dither: DitherPolicy = NoDither()

    def __post_init__(self):
        if not (self.resolution > 0):
            raise QuantizerConfigError(
                f"resolution must be positive, got {self.resolution}")

    def _dithers(self, shape) -> np.ndarray:
        """Uniform dithers in [-alpha/2, alpha/2] for the given shape."""
        if isinstance(self.dither, NoDither):
            return np.zeros(shape)
        rng = np.random.Generator(np.random.Philox(self.dither.seed))
        half = self.resolution / 2
        return rng.uniform(-half, half, size=shape)


def quantize_real(u: float, q: UniformQuantizer, dither: float = 0.0) -> float:
    """Quantize one real scalar with an explicitly supplied dither."""
    a = q.resolution
    return float(np.floor((u + dither) / a) * a + a / 2)


def _quantize_array(u: np.ndarray, q: UniformQuantizer) -> np.ndarray:
    """Entrywise complex quantization; real and imag parts get independent dithers."""
    u = np.asarray(u, dtype=complex)
    if u.size == 0:
        return u.copy()
    a = q.resolution
    xi = q._dithers(u.shape + (2,))
    re = np.floor((u.real + xi[..., 0]) / a) * a + a / 2
    im = np.floor((u.imag + xi[..., 1]) / a) * a + a / 2
    return re + 1j * im


def quantize_complex_vector(u: np.ndarray, q: UniformQuantizer) -> np.ndarray:
    """Quantize a complex vector componentwise."""
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    return _quantize_array(u, q)


def quantize_matrix(phi: np.ndarray, q: UniformQuantizer) -> np.ndarray:
    """Quantize a complex matrix entrywise with independent dithers per entry."""
    phi = np.asarray(phi, dtype=complex)
    return _quantize_array(phi, q)


def quantize_nonzero_parts(u: np.ndarray, q: UniformQuantizer) -> np.ndarray:
    """Entrywise quantization that leaves exactly-zero real/imag parts at zero.

    Used for structured factors (e.g. butterfly stages) whose zero parts are
    free in hardware: binarizing a part that is identically zero would inject
    full-scale noise into every such entry for no representational gain.
    """
    u = np.asarray(u, dtype=complex)
    if u.size == 0:
        return u.copy()
    a = q.resolution
    xi = q._dithers(u.shape + (2,))
    re = np.floor((u.real + xi[..., 0]) / a) * a + a / 2
    im = np.floor((u.imag + xi[..., 1]) / a) * a + a / 2
    re = np.where(u.real == 0, 0.0, re)
    im = np.where(u.imag == 0, 0.0, im)
    return re + 1j * im


def choose_binary_resolution(u: np.ndarray) -> float:
    """Smallest resolution making the quantizer output binary for this input.

    Returns 2 * max over components of max(|Re|, |Im|).  The infinity norm
    here is per real/imaginary part, not the complex modulus.
    """
    u = np.asarray(u, dtype=complex)
    if u.size == 0:
        raise ValueError("cannot choose a resolution for an empty input")
    peak = max(np.abs(u.real).max(), np.abs(u.imag).max())
    if peak == 0:
        raise ValueError("all-zero input: binary resolution would be 0")
    if not np.isfinite(peak):
        raise ValueError("input contains non-finite entries")
    return 2.0 * float(peak)
