"""Unitarily invariant norms, matrix corrections and almost-representation pipelines."""

from .corrections import (
    BoundCertificate,
    Projection,
    certify,
    nearest_involution,
    nearest_kth_root,
    nearest_unitary,
    negative_eigenprojection,
)
from .groups import (
    AlmostRep,
    Character,
    Presentation,
    Word,
    catalog_rep,
    defect,
    direct_sum,
    evaluate_word,
    isotypic_projection,
    pair_defect,
    perturb,
    separation,
)
from .harness import ExperimentConfig, SweepReport, emit, run
from .linalg import (
    SchattenIndex,
    abs_matrix,
    as_index,
    commutator,
    haar_unitary,
    norm,
    spectral_normal,
    svd,
)
from .pipelines import (
    CompressionReport,
    DeligneReport,
    central_separation_pipeline,
    compress,
    cross_norm_pipeline,
    deligne_pipeline,
)

__version__ = "0.1.0"
