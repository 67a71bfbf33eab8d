"""Monte Carlo checks of maximal identities for positive continuous martingales."""

from .core_paths import (
    DomainError,
    NOT_ATTAINED,
    Path,
    TimeGrid,
    balayage_transform,
    ito_sum,
    last_zero_index,
    read_path_csv,
    running_infimum,
    running_supremum,
    skorokhod_reflection,
    write_path_csv,
)
from .random_times import (
    RandomTimeRecord,
    hitting_time,
    last_passage,
    pseudo_stopping_time,
    record_times,
)
from .decompositions import (
    DecomposedPath,
    TestFunction,
    azema_yor,
    conditional_sup_law,
    decompose,
    dual_projection_sides,
    enlargement_compensator,
    h_transform,
    jump_factor,
    lambda_dot,
    realized_covariation,
    reconstruct_multiplicative,
    reconstruct_multiplicative_jumps,
    rho_density,
)
from .processes import (
    GbmSpec,
    PoissonMartingaleSpec,
    ScaleSpec,
    gen_bessel3,
    gen_brownian_stopped,
    gen_diffusion,
    gen_gbm_martingale,
    gen_poisson_exp_martingale,
    gen_transient_diffusion_bessel,
)
from .mc_engine import BatchConfig, VerificationReport, estimate_survival, ks_test
from .seeding import StreamBank, path_seed

__version__ = "0.1.0"
