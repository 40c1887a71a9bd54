"""Sensing operators: dense complex Gaussian, randomly sub/over-sampled
Fourier, and the radix-2 butterfly factorization of the DFT (optionally with
quantized factors).  All operators expose forward application (C^N -> C^m)
and the conjugate-transpose adjoint (C^m -> C^N)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quantizer import (DitherPolicy, NoDither, UniformQuantizer,
                        choose_binary_resolution, quantize_nonzero_parts)


class DimensionError(ValueError):
    """Raised when an operator is applied to a vector of the wrong length."""


@dataclass(frozen=True)
class SparseFactor:
    """One butterfly stage: exactly two structural nonzeros per row.

    Row i of the N x N factor is vals[i, 0] at column cols[i, 0] plus
    vals[i, 1] at column cols[i, 1].
    """

    dim: int
    cols: np.ndarray  # (N, 2) int
    vals: np.ndarray  # (N, 2) complex

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.vals[:, 0] * x[self.cols[:, 0]] + self.vals[:, 1] * x[self.cols[:, 1]]

    def adjoint(self, z: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim, dtype=complex)
        np.add.at(out, self.cols[:, 0], np.conj(self.vals[:, 0]) * z)
        np.add.at(out, self.cols[:, 1], np.conj(self.vals[:, 1]) * z)
        return out

    def dense(self) -> np.ndarray:
        mat = np.zeros((self.dim, self.dim), dtype=complex)
        rows = np.arange(self.dim)
        mat[rows, self.cols[:, 0]] += self.vals[:, 0]
        mat[rows, self.cols[:, 1]] += self.vals[:, 1]
        return mat


@dataclass(frozen=True)
class DenseComplex:
    entries: np.ndarray  # (m, N)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    def apply(self, x):
        return self.entries @ x

    def adjoint(self, z):
        return np.conj(self.entries.T) @ z

    def dense(self) -> np.ndarray:
        return self.entries


@dataclass(frozen=True)
class PartialFourier:
    """Row-sampled DFT: entry (k, j) = exp(-2*pi*i * rows[k] * j / N)."""

    dim: int
    rows: np.ndarray  # (m,) int in [0, N)

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return self.dim

    def dense(self) -> np.ndarray:
        j = np.arange(self.dim)
        return np.exp(-2j * np.pi * np.outer(self.rows, j) / self.dim)

    def apply(self, x):
        # full FFT then row selection; fine at the N used here
        return np.fft.fft(x)[self.rows]

    def adjoint(self, z):
        full = np.zeros(self.dim, dtype=complex)
        np.add.at(full, self.rows, z)
        # adjoint of row-sampled DFT = scatter, then inverse-DFT scaled by N
        return np.fft.ifft(full) * self.dim


@dataclass(frozen=True)
class ButterflyChain:
    """DFT_N = factors[-1] @ ... @ factors[0] @ P, rows then sub/over-sampled.

    With unquantized factors this reproduces the row-sampled DFT exactly;
    with quantized factors it is the fast 1-bit back-projection chain.
    """

    dim: int
    factors: tuple[SparseFactor, ...]
    permutation: np.ndarray  # bit-reversal index map
    rows: np.ndarray

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return self.dim

    def apply_full(self, x: np.ndarray) -> np.ndarray:
        y = x[self.permutation]
        for f in self.factors:
            y = f.apply(y)
        return y

    def apply(self, x):
        return self.apply_full(x)[self.rows]

    def adjoint(self, z):
        full = np.zeros(self.dim, dtype=complex)
        np.add.at(full, self.rows, z)
        for f in reversed(self.factors):
            full = f.adjoint(full)
        out = np.zeros(self.dim, dtype=complex)
        out[self.permutation] = full
        return out

    def dense(self) -> np.ndarray:
        mat = np.eye(self.dim, dtype=complex)[self.permutation]
        for f in self.factors:
            mat = f.dense() @ mat
        return mat[self.rows]


SensingOperator = DenseComplex | PartialFourier | ButterflyChain


def _check_dims(op, x, length):
    if len(x) != length:
        raise DimensionError(f"expected length {length}, got {len(x)}")


def apply(op: SensingOperator, x: np.ndarray) -> np.ndarray:
    """Forward application y = Phi x."""
    x = np.asarray(x, dtype=complex)
    _check_dims(op, x, op.n)
    return op.apply(x)


def adjoint_apply(op: SensingOperator, z: np.ndarray,
                  support=None) -> np.ndarray:
    """Conjugate-transpose application Phi^H z (no 1/m scaling).

    If a support index set is given, only those output components are kept;
    the rest are zero.
    """
    z = np.asarray(z, dtype=complex)
    _check_dims(op, z, op.m)
    out = op.adjoint(z)
    if support is not None:
        support = np.asarray(support, dtype=int)
        if support.size and (support.min() < 0 or support.max() >= op.n):
            raise IndexError("support index out of range")
        mask = np.zeros(op.n, dtype=bool)
        mask[support] = True
        out = np.where(mask, out, 0)
    return out


def gaussian_operator(m: int, n: int, seed: int) -> DenseComplex:
    """i.i.d. complex Gaussian entries with E|Phi_ij|^2 = 1 (variance 1/2
    per real and imaginary part), matching the 1/m isometry normalization."""
    if m < 1 or n < 1:
        raise ValueError("m and N must be >= 1")
    rng = np.random.default_rng(seed)
    ent = (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)
    return DenseComplex(ent)


def _sample_rows(n: int, m: int, seed: int) -> np.ndarray:
    # i.i.d. uniform with replacement; required anyway when m > n
    rng = np.random.default_rng(seed)
    return rng.integers(0, n, size=m)


def partial_fourier_operator(n: int, m: int, seed: int) -> PartialFourier:
    """Randomly (sub/over)-sampled DFT; rows drawn uniformly with replacement."""
    if m < 1 or n < 1:
        raise ValueError("m and N must be >= 1")
    return PartialFourier(dim=n, rows=_sample_rows(n, m, seed))


def full_dft(n: int) -> PartialFourier:
    """The complete N-point DFT as a sensing operator (test/baseline fixture)."""
    if n < 1:
        raise ValueError("N must be >= 1")
    return PartialFourier(dim=n, rows=np.arange(n))


def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    rev = np.zeros(n, dtype=int)
    for i in range(n):
        r = 0
        for b in range(bits):
            r = (r << 1) | ((i >> b) & 1)
        rev[i] = r
    return rev


def butterfly_factorize(n: int) -> tuple[list[SparseFactor], np.ndarray]:
    """Radix-2 decimation-in-time factorization of the N-point DFT.

    Returns (factors, permutation) with DFT_N = B_k ... B_1 P, P the
    bit-reversal permutation, and each B_l holding exactly two structural
    nonzeros per row (an identity tap and a +-twiddle tap).
    """
    if n < 2 or n & (n - 1):
        raise ValueError(f"N must be a power of two >= 2, got {n}")
    perm = _bit_reverse(n)
    factors = []
    size = 2
    while size <= n:
        half = size // 2
        cols = np.zeros((n, 2), dtype=int)
        vals = np.zeros((n, 2), dtype=complex)
        tw = np.exp(-2j * np.pi * np.arange(half) / size)
        for start in range(0, n, size):
            for t in range(half):
                i, j = start + t, start + t + half
                cols[i] = (i, j)
                vals[i] = (1.0, tw[t])
                cols[j] = (i, j)
                vals[j] = (1.0, -tw[t])
        factors.append(SparseFactor(dim=n, cols=cols, vals=vals))
        size *= 2
    return factors, perm


def butterfly_operator(n: int, m: int, seed: int) -> ButterflyChain:
    """Row-sampled DFT evaluated through the butterfly chain; same row
    sampling rule (and seed stream) as partial_fourier_operator."""
    factors, perm = butterfly_factorize(n)
    return ButterflyChain(dim=n, factors=tuple(factors), permutation=perm,
                          rows=_sample_rows(n, m, seed))


def quantize_butterfly(chain: ButterflyChain,
                       dither: DitherPolicy = NoDither()) -> ButterflyChain:
    """Quantize each butterfly factor's structural nonzeros to 1 bit.

    Per-factor resolution nu_l = 2 * max(|Re|, |Im|) over that factor's
    nonzero values.  Structural zeros are preserved so the chain keeps its
    O(N log N) application cost, and so are exactly-zero real/imag parts of
    nonzero taps (a part that is identically zero is free in hardware;
    binarizing it would only inject full-scale noise).  Dither seeds are
    derived per factor so entries get independent dithers.
    """
    qfactors = []
    for idx, f in enumerate(chain.factors):
        nu = choose_binary_resolution(f.vals)
        if isinstance(dither, NoDither):
            q = UniformQuantizer(nu, NoDither())
        else:
            sub = np.random.SeedSequence([dither.seed, idx]).generate_state(1)[0]
            q = UniformQuantizer(nu, type(dither)(int(sub)))
        qvals = quantize_nonzero_parts(f.vals, q)
        qfactors.append(SparseFactor(dim=f.dim, cols=f.cols, vals=qvals))
    return ButterflyChain(dim=chain.dim, factors=tuple(qfactors),
                          permutation=chain.permutation, rows=chain.rows)


def _factor_adjoint_maps(f: SparseFactor):
    """For each output column j, the two (source row, tap) pairs feeding it."""
    flat = f.cols.ravel()
    order = np.argsort(flat, kind="stable")
    src, tap = np.divmod(order, 2)
    return src.reshape(f.dim, 2), tap.reshape(f.dim, 2)


_ROW_CHUNK = 512  # fixed so dither streams do not depend on caller batching


def quantized_butterfly_adjoint(chain: ButterflyChain, z: np.ndarray,
                                seed: int) -> np.ndarray:
    """Psi^H z where row k of Psi comes from an independently quantized
    butterfly chain.

    Every measurement re-quantizes the factors with fresh dithers, matching
    the dense scheme where each of the m matrix rows carries independent
    dither noise (repeated Fourier rows included).  Rows are processed in
    fixed-size chunks with vectorized per-row factor values.
    """
    z = np.asarray(z, dtype=complex)
    n, m = chain.dim, chain.m
    if len(z) != m:
        raise DimensionError(f"expected length {m}, got {len(z)}")
    nus = [choose_binary_resolution(f.vals) for f in chain.factors]
    maps = [_factor_adjoint_maps(f) for f in chain.factors]
    out = np.zeros(n, dtype=complex)
    for ci, start in enumerate(range(0, m, _ROW_CHUNK)):
        stop = min(start + _ROW_CHUNK, m)
        c = stop - start
        rng = np.random.Generator(np.random.Philox(
            np.random.SeedSequence([seed, ci])))
        cur = np.zeros((c, n), dtype=complex)
        cur[np.arange(c), chain.rows[start:stop]] = z[start:stop]
        for f, nu, (src, tap) in zip(reversed(chain.factors),
                                     reversed(nus), reversed(maps)):
            xi = rng.uniform(-nu / 2, nu / 2, size=(c,) + f.vals.shape + (2,))
            re = np.floor((f.vals.real + xi[..., 0]) / nu) * nu + nu / 2
            im = np.floor((f.vals.imag + xi[..., 1]) / nu) * nu + nu / 2
            qv = (np.where(f.vals.real == 0, 0.0, re)
                  - 1j * np.where(f.vals.imag == 0, 0.0, im))  # conjugated
            nxt = (qv[:, src[:, 0], tap[:, 0]] * cur[:, src[:, 0]]
                   + qv[:, src[:, 1], tap[:, 1]] * cur[:, src[:, 1]])
            cur = nxt
        out[chain.permutation] += cur.sum(axis=0)
    return out


def estimate_rip_delta(op: SensingOperator, s: int, probes: int,
                       seed: int) -> float:
    """Empirical lower bound on the isometry constant: max over random unit
    s-sparse probes of |(1/m)||Phi x||^2 - 1|."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(probes):
        x = np.zeros(op.n, dtype=complex)
        supp = rng.choice(op.n, size=min(s, op.n), replace=False)
        coef = rng.standard_normal(len(supp)) + 1j * rng.standard_normal(len(supp))
        x[supp] = coef / np.linalg.norm(coef)
        dev = abs(np.linalg.norm(apply(op, x)) ** 2 / op.m - 1.0)
        worst = max(worst, dev)
    return worst
