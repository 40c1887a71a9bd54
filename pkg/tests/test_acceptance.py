"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Monte-Carlo sweeps are shared across criteria through session-scope fixtures;
all sweeps use trials=100 and a pinned base seed, so every number here is
deterministic.
"""

import json
import time

import numpy as np
import pytest

from onebitcs import bitkernel as bk
from onebitcs import cli
from onebitcs import experiments as ex
from onebitcs import operators as ops
from onebitcs import recon
from onebitcs.experiments import ExperimentConfig
from onebitcs.quantizer import (FreshUniform, UniformQuantizer,
                                quantize_complex_vector)
from onebitcs.recon import SchemeKind

BASE_SEED = 1
N = 64
TRIALS = 100


def report(num, name, ok, detail):
    print(f"ACCEPTANCE {num} ({name}): {'PASS' if ok else 'FAIL'} -- {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


def sweep(schemes, sparsities, ratios, matrix):
    cfg = ExperimentConfig(dim_n=N, sparsities=sparsities, log2_ratios=ratios,
                           schemes=schemes, matrix=matrix, trials=TRIALS,
                           base_seed=BASE_SEED)
    return ex.run_experiment(cfg)


@pytest.fixture(scope="session")
def fourier_s4():
    t0 = time.perf_counter()
    rows = sweep((SchemeKind.QPBPQ,), (4,), (2, 3, 4, 5, 6, 7), "fourier")
    return rows, time.perf_counter() - t0


@pytest.fixture(scope="session")
def fourier_s4_nodither():
    return sweep((SchemeKind.QPBPQ_NO_MATRIX_DITHER,), (4,),
                 (2, 3, 4, 5, 6, 7), "fourier")


@pytest.fixture(scope="session")
def fourier_s2_s10():
    return sweep((SchemeKind.QPBPQ, SchemeKind.PBPQ), (2, 10),
                 (3, 4, 5, 6, 7), "fourier")


@pytest.fixture(scope="session")
def gaussian_s4():
    return sweep((SchemeKind.QPBPQ,), (4,), (3, 4, 5, 6, 7), "gaussian")


@pytest.fixture(scope="session")
def butterfly_s4():
    return sweep((SchemeKind.QPBPQ,), (4,), (2, 3, 4, 5, 6, 7), "butterfly")


def by_ratio(rows, scheme=None, s=None):
    return {r.log2_ratio: r.mean_db for r in rows
            if (scheme is None or r.scheme is scheme)
            and (s is None or r.s == s)}


def test_criterion_1_decay_rate(fourier_s4):
    rows, elapsed = fourier_s4
    slope = ex.fit_decay_slope(rows, 2.0)
    ok = -2.0 <= slope <= -1.0 and elapsed <= 300
    report(1, "decay rate", ok,
           f"slope={slope:.4f} dB/octave (target -1.505, band [-2,-1]), "
           f"sweep took {elapsed:.1f}s (limit 300s)")


def test_criterion_2_pbp_exactness():
    op = ops.full_dft(N)
    worst = -np.inf
    for t in range(100):
        x = recon.gen_sparse_signal(N, 4, seed=10_000 + t)
        res = recon.reconstruct(SchemeKind.PBP, op, x, 4, 0, 0)
        worst = max(worst, res.error_db)
    report(2, "PBP exactness", worst <= -100,
           f"worst error over 100 signals {worst:.1f} dB (limit -100)")


def test_criterion_3_dither_necessity(fourier_s4, fourier_s4_nodither):
    dith = by_ratio(fourier_s4[0])
    nod = by_ratio(fourier_s4_nodither)
    advantage = nod[7] - dith[7]
    saturation = nod[4] - nod[7]
    ok = advantage >= 5.0 and saturation <= 2.0
    report(3, "dither necessity", ok,
           f"dithered at r=7 {dith[7]:.2f} dB vs no-dither {nod[7]:.2f} dB "
           f"(advantage {advantage:.2f} >= 5); no-dither r4->r7 gain "
           f"{saturation:.2f} dB (<= 2)")


def test_criterion_4_constant_gap(fourier_s2_s10):
    details = []
    ok = True
    for s in (2, 10):
        q = by_ratio(fourier_s2_s10, SchemeKind.QPBPQ, s)
        p = by_ratio(fourier_s2_s10, SchemeKind.PBPQ, s)
        gaps = [q[r] - p[r] for r in (3, 4, 5, 6, 7)]
        spread = max(gaps) - min(gaps)
        ok = ok and min(gaps) > 0 and spread <= 3.0
        details.append(f"s={s}: gaps {[f'{g:.2f}' for g in gaps]} "
                       f"spread {spread:.2f}")
    report(4, "constant gap vs PBPQ", ok, "; ".join(details))


def test_criterion_5_fourier_vs_gaussian(fourier_s4, gaussian_s4):
    f = by_ratio(fourier_s4[0])
    g = by_ratio(gaussian_s4)
    diffs = {r: g[r] - f[r] for r in (3, 4, 5, 6, 7)}
    ok = all(d >= 0 for d in diffs.values())
    report(5, "Gaussian needs more measurements", ok,
           f"gaussian minus fourier mean_db {[f'{d:.2f}' for d in diffs.values()]} "
           f"(all >= 0)")


def test_criterion_6_butterfly_viability(fourier_s4, butterfly_s4):
    b = by_ratio(butterfly_s4)
    f = by_ratio(fourier_s4[0])
    decrease = b[2] - b[7]
    gap = b[7] - f[7]
    ok = decrease >= 4.0 and gap <= 6.0
    report(6, "butterfly viability", ok,
           f"butterfly r2->r7 decrease {decrease:.2f} dB (>= 4); "
           f"gap to dense Fourier at r=7 {gap:.2f} dB (<= 6)")


def test_criterion_7_quantizer_properties():
    rng = np.random.default_rng(77)
    n = 10 ** 6
    alpha = 10.0 ** rng.uniform(-3, 3, n)
    u = rng.uniform(-1, 1, n) * 1e3
    xi = rng.uniform(-0.5, 0.5, n) * alpha
    q = np.floor((u + xi) / alpha) * alpha + alpha / 2
    bound_ok = bool(np.all(np.abs(q - u) <= alpha * (1 + 1e-9)))

    reps = 10 ** 5
    bias_ok = True
    for i, (u0, a0) in enumerate([(0.4, 2.0), (-1.3, 3.0), (0.0, 1.0)]):
        outs = np.full(reps, u0, dtype=complex)
        qz = UniformQuantizer(a0, FreshUniform(500 + i))
        res = float(np.real(np.mean(quantize_complex_vector(outs, qz))))
        bias_ok = bias_ok and abs(res - u0) <= 0.01 * a0

    vals = rng.uniform(-1, 1, 10 ** 4) + 1j * rng.uniform(-1, 1, 10 ** 4)
    out = quantize_complex_vector(vals, UniformQuantizer(2.0, FreshUniform(9)))
    binary_ok = bool(np.all(np.abs(out.real) == 1)
                     and np.all(np.abs(out.imag) == 1))

    ok = bound_ok and bias_ok and binary_ok
    report(7, "quantizer properties", ok,
           f"bound={bound_ok} bias<=0.01a={bias_ok} binary={binary_ok}")


def test_criterion_8_bitkernel_exactness():
    rng = np.random.default_rng(88)
    bad = 0
    for _ in range(1000):
        m = int(rng.integers(1, 258))
        n = int(rng.integers(1, 65))
        psi = (rng.integers(0, 2, (m, n)) * 2 - 1
               + 1j * (rng.integers(0, 2, (m, n)) * 2 - 1)).astype(complex)
        z = (rng.integers(0, 2, m) * 2 - 1
             + 1j * (rng.integers(0, 2, m) * 2 - 1)).astype(complex)
        out = bk.binary_adjoint_multiply(bk.pack_matrix(psi, 1.0),
                                         bk.pack_vector(z, 1.0))
        oracle = np.conj(psi.T) @ z  # integer-exact in floating point
        if not np.array_equal(out, oracle):
            bad += 1
    report(8, "bitkernel exactness", bad == 0,
           f"{bad}/1000 randomized instances deviated from the dense oracle")


def test_criterion_9_butterfly_correctness():
    worst = 0.0
    for n in (2, 4, 8, 16, 32, 64, 128, 256):
        factors, perm = ops.butterfly_factorize(n)
        mat = np.eye(n, dtype=complex)[perm]
        for f in factors:
            mat = f.dense() @ mat
        dft = np.exp(-2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
        worst = max(worst, float(np.max(np.abs(mat - dft))))

    rng = np.random.default_rng(99)
    worst_adj = 0.0
    variants = [ops.gaussian_operator(24, 32, seed=1),
                ops.partial_fourier_operator(32, 24, seed=1),
                ops.butterfly_operator(32, 24, seed=1),
                ops.quantize_butterfly(ops.butterfly_operator(32, 24, seed=1),
                                       FreshUniform(2))]
    for op in variants:
        x = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
        z = rng.standard_normal(op.m) + 1j * rng.standard_normal(op.m)
        lhs = np.vdot(z, ops.apply(op, x))
        rhs = np.vdot(ops.adjoint_apply(op, z), x)
        worst_adj = max(worst_adj, abs(lhs - rhs) / max(1.0, abs(lhs)))

    ok = worst <= 1e-10 and worst_adj <= 1e-10
    report(9, "butterfly correctness", ok,
           f"max |factors*P - DFT| = {worst:.2e} (<= 1e-10); "
           f"worst adjoint-consistency residual {worst_adj:.2e} (<= 1e-10)")


def test_criterion_10_determinism(tmp_path):
    cfg = dict(dim_n=32, sparsities=[2], log2_ratios=[1.0, 3.0],
               schemes=["qpbpq", "pbpq"], matrix="fourier", trials=5,
               base_seed=11)
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    outs = []
    for threads in (1, 8):
        out = tmp_path / f"out{threads}.csv"
        rc = cli.main(["run", "--config", str(cfg_path), "--out", str(out),
                       "--threads", str(threads)])
        assert rc == 0
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > len(ex.CSV_HEADER)
    report(10, "determinism", ok,
           "byte-identical CSVs across --threads 1 and 8")
