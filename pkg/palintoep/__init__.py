from .ensemble import (
    EnsembleSpec,
    EntryDistribution,
    PalindromicMatrix,
    build_matrix,
    get_distribution,
    link_index,
    sample_entries,
    validate_spec,
)
from .estimation import (
    EnsembleRun,
    ExtrapolationFit,
    MomentTable,
    extrapolate,
    monte_carlo_moments,
    run_ensemble,
)
from .helper import (
    ConfigError,
    ConvergenceError,
    DimensionError,
    FitError,
    GuardError,
    PalintoepError,
)
from .matchings import (
    PairMatching,
    configuration_contribution,
    enumerate_pair_matchings,
    exact_expected_moment,
)
from .spectra import eigenvalues_symmetric, empirical_moments

COMMAND_VALIDATE = 'validate'
COMMAND_SIMULATE = 'simulate'
COMMAND_EXACT = 'exact'
COMMAND_FORMULAS = 'formulas'
COMMAND_EXTRAPOLATE = 'extrapolate'
COMMAND_CONFIGURATIONS = 'configurations'
COMMAND_DIAGNOSE = 'diagnose'


COMMANDS = (
    COMMAND_VALIDATE,
    COMMAND_SIMULATE,
    COMMAND_EXACT,
    COMMAND_FORMULAS,
    COMMAND_EXTRAPOLATE,
    COMMAND_CONFIGURATIONS,
    COMMAND_DIAGNOSE,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_NUMERICAL = 4
