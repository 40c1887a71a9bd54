"""1-bit compressive sensing: dithered quantization of measurements and
sensing matrix, projected back-projection recovery, bit-packed binary
kernels, and a Monte-Carlo sweep harness."""

from .quantizer import (FreshUniform, NoDither, UniformQuantizer,
                        choose_binary_resolution, quantize_complex_vector,
                        quantize_matrix, quantize_real)
from .operators import (ButterflyChain, DenseComplex, PartialFourier,
                        SparseFactor, adjoint_apply, apply,
                        butterfly_factorize, butterfly_operator,
                        estimate_rip_delta, full_dft, gaussian_operator,
                        partial_fourier_operator, quantize_butterfly)
from .bitkernel import (BinaryMatrix, BinaryVector, binary_adjoint_multiply,
                        binary_adjoint_multiply_masked, pack_matrix,
                        pack_vector, unpack_matrix, unpack_vector)
from .recon import (ReconResult, SchemeKind, SparseSignal, error_db,
                    gen_sparse_signal, hard_threshold, pbp_core, reconstruct)
from .experiments import (ExperimentConfig, SummaryRow, fit_decay_slope,
                          run_experiment, run_trial, write_csv)

__version__ = "0.1.0"
