"""Sparse signal generation, hard thresholding, and the PBP family of
back-projection estimators.

Schemes:
  PBP    -- x_hat = (1/m) H_s(Phi^H y), analog measurements.
  PBPQ   -- measurements quantized to 1 bit, unquantized back-projection.
  QPBPQ  -- both measurements and the back-projection matrix quantized;
            evaluated through the bit-packed XOR/popcount kernel (or, for
            butterfly operators, through the quantized fast chain).
  QPBPQ_NO_MATRIX_DITHER -- ablation: matrix quantizer uses zero dither.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import bitkernel, operators
from .operators import ButterflyChain, SensingOperator
from .quantizer import (FreshUniform, NoDither, UniformQuantizer,
                        choose_binary_resolution, quantize_complex_vector,
                        quantize_matrix)


class SchemeKind(enum.Enum):
    PBP = "pbp"
    PBPQ = "pbpq"
    QPBPQ = "qpbpq"
    QPBPQ_NO_MATRIX_DITHER = "qpbpq-nodither"


@dataclass(frozen=True)
class SparseSignal:
    dim: int
    support: np.ndarray
    coefficients: np.ndarray

    @property
    def s(self) -> int:
        return len(self.support)

    def dense(self) -> np.ndarray:
        x = np.zeros(self.dim, dtype=complex)
        x[self.support] = self.coefficients
        return x


@dataclass(frozen=True)
class ReconResult:
    estimate: np.ndarray
    support: np.ndarray
    scheme: SchemeKind
    error_db: float


def gen_sparse_signal(n: int, s: int, seed: int) -> SparseSignal:
    """Unit-norm s-sparse complex signal: uniform random support, i.i.d.
    complex Gaussian coefficients normalized to unit Euclidean norm."""
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= N, got s={s}, N={n}")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(n, size=s, replace=False))
    coef = rng.standard_normal(s) + 1j * rng.standard_normal(s)
    coef /= np.linalg.norm(coef)
    return SparseSignal(dim=n, support=support, coefficients=coef)


def hard_threshold(u: np.ndarray, s: int):
    """Keep the s largest components by modulus, zero the rest.

    Returns (thresholded vector, kept indices); ties go to the smaller index.
    """
    u = np.asarray(u, dtype=complex)
    if s >= len(u):
        return u.copy(), np.arange(len(u))
    if s <= 0:
        return np.zeros_like(u), np.array([], dtype=int)
    # stable sort on -|u| keeps the smaller index first among ties
    order = np.argsort(-np.abs(u), kind="stable")
    keep = np.sort(order[:s])
    out = np.zeros_like(u)
    out[keep] = u[keep]
    return out, keep


def pbp_core(adjoint_result: np.ndarray, m: int, s: int):
    """(1/m) H_s(adjoint_result) and its support."""
    est, supp = hard_threshold(np.asarray(adjoint_result, dtype=complex) / m, s)
    return est, supp


def error_db(x: SparseSignal, estimate: np.ndarray) -> float:
    """10*log10 of || x - estimate/||estimate|| ||_2, clamped at -160 dB.

    A zero estimate maps to 0 dB (the ground truth has unit norm).
    """
    nrm = np.linalg.norm(estimate)
    if nrm == 0:
        return 0.0
    err = np.linalg.norm(x.dense() - estimate / nrm)
    if err == 0:
        return -160.0
    return max(10.0 * np.log10(err), -160.0)


def _quantized_dense_adjoint(phi, b, eps, nu, matrix_dither):
    """Psi^H b with Psi = Q_nu(Phi), evaluated via the bit-packed kernel."""
    psi = quantize_matrix(phi, UniformQuantizer(nu, matrix_dither))
    packed_mat = bitkernel.pack_matrix(psi, nu / 2)
    packed_vec = bitkernel.pack_vector(b, eps / 2)
    return bitkernel.binary_adjoint_multiply(packed_mat, packed_vec)


def reconstruct(scheme: SchemeKind, op: SensingOperator, x: SparseSignal,
                s: int, meas_seed: int, matrix_seed: int) -> ReconResult:
    """Run one back-projection reconstruction.

    Sensing is always analog (y = Phi x with the unquantized operator);
    quantization models the ADC and, for QPBPQ, the stored matrix.
    Binary resolutions are the tightest admissible: eps = 2||y||_inf per
    trial and nu = 2||Phi||_inf per operator (per factor for butterflies).
    """
    if op.n != x.dim:
        raise operators.DimensionError(
            f"operator N={op.n} does not match signal dim={x.dim}")
    xv = x.dense()
    if not np.any(xv):
        raise ValueError("zero signal")
    y = operators.apply(op, xv)
    m = op.m

    if scheme is SchemeKind.PBP:
        back = operators.adjoint_apply(op, y)
    else:
        eps = choose_binary_resolution(y)
        b = quantize_complex_vector(y, UniformQuantizer(eps, FreshUniform(meas_seed)))
        if scheme is SchemeKind.PBPQ:
            back = operators.adjoint_apply(op, b)
        else:
            dither = (NoDither() if scheme is SchemeKind.QPBPQ_NO_MATRIX_DITHER
                      else FreshUniform(matrix_seed))
            if isinstance(op, ButterflyChain):
                if isinstance(dither, NoDither):
                    # deterministic quantization: one chain serves all rows
                    qchain = operators.quantize_butterfly(op, dither)
                    back = operators.adjoint_apply(qchain, b)
                else:
                    back = operators.quantized_butterfly_adjoint(
                        op, b, matrix_seed)
            else:
                phi = op.dense()
                nu = choose_binary_resolution(phi)
                back = _quantized_dense_adjoint(phi, b, eps, nu, dither)

    est, supp = pbp_core(back, m, s)
    return ReconResult(estimate=est, support=supp, scheme=scheme,
                       error_db=error_db(x, est))
