"""Deep ReLU networks initialized exactly to polynomial approximations.

The package has two faces: a functional core (Legendre bases, exact network
constructions, from-scratch ADAM training) and scikit-learn style estimators
that wrap the full pipeline behind ``fit``/``predict``.
"""

from .basis import (
    Expansion,
    IndexSet,
    eval_basis,
    eval_expansion,
    fit_least_squares,
    load_expansion,
    save_expansion,
    total_degree_set,
)
from .construct import (
    Block,
    BlockLayout,
    SquaringPlan,
    breakpoint_grid,
    build_expansion_net,
    build_monomial_net,
    build_product_net,
    build_squaring_net,
    build_stilde_net,
    expansion_error_bound,
    monomial_error_bound,
    product_error_bound,
    squaring_error_bound,
    stilde_error_bound,
    stilde_reference,
)
from .estimators import (
    DenseReluRegressor,
    LegendreExpansionRegressor,
    PolyInitNetRegressor,
    QuadraticInitNetRegressor,
)
from .exceptions import NumericalError, RankDeficiencyError, RootSolveError
from .legendre import (
    UnivariatePoly,
    factorize,
    leading_coefficient,
    legendre_eval,
    legendre_eval_shifted,
    legendre_roots,
)
from .network import (
    DenseNet,
    Layer,
    LossTrace,
    TrainConfig,
    adam_step,
    backward,
    forward,
    forward_trace,
    freeze_all_but_output,
    freeze_nothing,
    load_net,
    mse_loss,
    save_net,
    train,
    xavier_init,
)

__version__ = "0.1.0"
