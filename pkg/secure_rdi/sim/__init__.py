from .typicality import all_sequences, robust_typical
from .binning import PadIndex, BinningExperiment, LemmaReport, \
    one_time_pad, exact_binning_entropy, codeword_binning_entropy
from .scheme import SchemeCodebook, SimReport, simulate_scheme_open
from .amplification import SequenceJoint, measure_list, \
    measure_block_entropy, check_amplification
