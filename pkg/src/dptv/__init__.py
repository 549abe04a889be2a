"""Double-phase total-variation denoising on regular grids.

Classical TV (ROF), Huber-TV and adaptive double-phase denoising models
solved with standard and accelerated first-order primal-dual iterations,
together with the spatial-weight construction pipeline, noise injection,
quality metrics and grayscale image I/O.
"""

from .grids import (
    NoiseSpec,
    add_gaussian_noise,
    as_field,
    divergence,
    gradient,
    gradient_norm_bound,
    gradient_norm_sq_bound,
    inner,
    mollify,
    norm2,
)
from .images import (
    ImageFormatError,
    MalformedImageError,
    UnsupportedDepthError,
    load_image,
    make_synthetic,
    save_image,
)
from .metrics import (
    CSV_HEADER,
    MetricReport,
    compute_metrics,
    d_l2_image,
    d_tv_image,
    format_metric_row,
    psnr,
    ssim,
)
from .pipeline import MODELS, PipelineResult, RunReport, default_config, run_model
from .prox import (
    DoublePhase,
    FidelityParams,
    Huber,
    TV,
    conjugate_value_double_phase,
    dual_prox,
    penalty_value,
    prox_fstar_double_phase,
    prox_fstar_huber,
    prox_fstar_tv,
    prox_g,
)
from .solver import (
    SolveResult,
    SolverConfig,
    accelerated_step_schedule,
    primal_energy,
    solve,
    solve_accelerated,
    solve_standard,
    stopping_residual,
)
from .weights import (
    WeightBuildReport,
    WeightSpec,
    build_weight_adaptive,
    build_weight_noisy,
    eval_weight_function,
    rescale_weight_spec,
)

__version__ = "0.1.0"
