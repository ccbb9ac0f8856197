"""Frames of operator iterates: frame operators, Parseval indices, tightening and Hardy model spaces."""
from . import defect, errors, frames, hardy, inner, instances, numkit, operators, tighten
from .defect import defect as defect_data, model_space_of, parseval_generators, parseval_index, rota_embed
from .frames import (ExactStein, FrameReport, FrameSystem, Series, frame_bounds, frame_index_oracle,
                     frame_operator, reconstruct, reduce_generators, synthesis_kernel, synthesis_matrix)
from .inner import BlaschkeProduct, MatrixInner
from .operators import (OperatorSpec, admissibility, dense, diagonal, op_norm, similarity_transform,
                        spectral_radius)
from .tighten import canonical_tighten, index_certificate

__version__ = "0.1.0"

__all__ = [
    "BlaschkeProduct", "ExactStein", "FrameReport", "FrameSystem", "MatrixInner", "OperatorSpec",
    "Series", "admissibility", "canonical_tighten", "defect", "defect_data", "dense", "diagonal",
    "errors", "frame_bounds", "frame_index_oracle", "frame_operator", "frames", "hardy", "index_certificate", "inner",
    "instances", "model_space_of", "numkit", "op_norm", "operators", "parseval_generators",
    "parseval_index", "reconstruct", "reduce_generators", "rota_embed", "similarity_transform",
    "spectral_radius", "synthesis_kernel", "synthesis_matrix", "tighten",
]
