"""QMF filter banks on integer lattices, their loop-group matrices,
elementary-step synthesis and two-channel 1-D factorization."""
from .errors import *  # noqa: F401,F403
from .factorize import (
    ElementaryStep,
    FactorizationResult,
    elementary_apply,
    factorize_1d,
    random_qmf,
    reconstruct,
    synthesize,
)
from .filterbank import (
    FilterBank,
    coset_factor,
    fourier,
    haar_bank,
    is_qmf,
    is_twisted,
    lazy_bank,
    loop_from_qmf,
    power_complementarity,
    qmf_matrix,
    twisted_factor,
    vanishing_moments,
)
from .lattice import CosetSystem, DualCosetSystem, LatticeBasis, coset_representatives, dual_coset_representatives, index, reduce
from .laurent import LaurentPoly, LoopMatrix, is_gamma_periodic, is_paraunitary, para_adjoint
from .sequences import Filter, Sequence, Signal, delta
from .transform import SubbandSet, analysis, apply_unitary, energy_split, lazy_analysis, poisson_project, synthesis

__version__ = "0.1.0"


def __getattr__(name):
    # keep sklearn off the import path unless the estimator is asked for
    if name == "QMFTransformer":
        from .estimator import QMFTransformer

        return QMFTransformer
    raise AttributeError(name)
