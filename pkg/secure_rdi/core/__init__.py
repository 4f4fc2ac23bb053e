from .probability import Alphabet, JointPMF, ConditionalPMF, entropy, \
    mutual_information, binary_entropy, check_markov, make_erasure_source
from .solvers import DistortionSpec, RDSolverConfig, SIEqualityReport, \
    rd_si_enc, rd_wyner_ziv, rd_erased_hamming, rd_logloss, \
    check_si_equality, helper_aux_optimize
from .regions import AuxChannelSet, RDIPoint, KeyRates, outer_bound_open, \
    inner_bound_open, region_open_markov, inner_bound_closed, \
    outer_bound_closed, region_closed, helper_inner_bound, \
    region_helper_logloss, region_helper_degraded
from .closed_forms import GaussianChainParams, erasure_region, \
    gaussian_region
