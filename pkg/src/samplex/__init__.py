"""samplex: a numerical laboratory for the sample complexity of linear
convolutional and recurrent networks.

The library evaluates three structured predictors exactly, reduces them to
dense linear regressors, fits them by least squares on synthetic Gaussian
data, predicts error rates from metric-entropy formulas, and constructs
Fano-method minimax packings.  See the demos/ directory for walkthroughs of
each capability and the ``samplex`` command line for batch sweeps.
"""

from .models import (
    KINDS,
    CAParams,
    CWParams,
    FNNParams,
    ModelSpec,
    Params,
    RNNParams,
    expand_ca,
    expand_cw,
    expand_params,
    expand_rnn,
    flatten_input,
    forward_ca,
    forward_cw,
    forward_fnn,
    forward_params,
    forward_rnn,
    segment,
)
from .datagen import (
    Dataset,
    derive_seed,
    dump_csv,
    gen_dataset,
    rng_from,
    sample_truth,
    sample_truth_rng,
)
from .estimators import (
    FitOptions,
    FitResult,
    batch_forward,
    ca_features,
    cw_loss_and_grad,
    fit,
    fit_ca,
    fit_cw,
    fit_fnn,
    fit_rnn,
    mc_prediction_error,
    ols,
    prediction_error,
    rnn_loss_and_grad,
)
from .theory import (
    BasicInequalityCheck,
    REEstimate,
    check_basic_inequality,
    covering_bound,
    dudley_bound,
    empirical_norm,
    restricted_eigs,
    theory_rate,
)
from .lowerbounds import (
    FANO_EPS_COEFF,
    BinaryCode,
    PackingSet,
    build_calibrated_packing,
    build_packing,
    constant_weight_code,
    cw_free_indices,
    fano_lower_bound,
    free_index_set,
    free_segment_ca,
    free_segment_cw,
    free_segment_rnn,
    kl_gaussian_pair,
    matched_eps_scale,
    scale_packing,
)
from .sweeps import (
    FIGURE_IDS,
    FigureCurve,
    ScalingFit,
    SweepConfig,
    SweepResult,
    SweepRow,
    figure_configs,
    figure_curves,
    fit_scaling_exponent,
    plot_figure,
    reproduce_figure,
    run_sweep,
    write_csv,
)
from .recheck import CheckResult, run_invariants

__version__ = "0.1.0"
