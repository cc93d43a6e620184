from subcusum.model.spiked_model import SpikedModel
from subcusum.model.scenario import Flavor, Scenario, iter_stream, sample_stream
from subcusum.model.projection import (
    ProjectionOperator,
    build_projection,
    reduce_switching,
)

__all__ = [
    "SpikedModel",
    "Flavor",
    "Scenario",
    "iter_stream",
    "sample_stream",
    "ProjectionOperator",
    "build_projection",
    "reduce_switching",
]
