"""Independent range sampling on intervals.

Indexes: :class:`IntervalTree` (search-then-sample baseline), :class:`AIT`
(uniform sampling, counting, updates), :class:`AITV` (linear space,
rejection sampling) and :class:`AWIT` (weight-proportional sampling).
"""

from .ait import AIT, ListTag, NodeRecord, QueryStats, RecordSet, build_ait
from .aitv import AITV, AITVStats, build_aitv
from .awit import AWIT, build_awit
from .errors import (DataFormatError, DegenerateSelectivity, DuplicateId, EmptyWeights, InvalidSampleSize,
                     InvalidWeight, IRSError, MissingWeights, NotFound, ValidationError)
from .model import (RNG_ALGORITHM, Dataset, Interval, QueryInterval, QuerySpec, load_dataset, load_queries,
                    make_rng, overlaps, pair_sort, save_dataset, save_queries)
from .sampling import (AliasTable, alias_distribution, alias_sample, build_alias, build_cumsum,
                       cumsum_sample_range)
from .tree import IntervalTree, build_interval_tree

__all__ = [
    "AIT", "AITV", "AITVStats", "AWIT", "AliasTable", "DataFormatError", "Dataset", "DegenerateSelectivity",
    "DuplicateId", "EmptyWeights", "IRSError", "Interval", "IntervalTree", "InvalidSampleSize",
    "InvalidWeight", "ListTag", "MissingWeights", "NodeRecord", "NotFound", "QueryInterval", "QuerySpec",
    "QueryStats", "RNG_ALGORITHM", "RecordSet", "ValidationError", "alias_distribution", "alias_sample",
    "build_ait", "build_aitv", "build_alias", "build_awit", "build_cumsum", "build_interval_tree",
    "cumsum_sample_range", "load_dataset", "load_queries", "make_rng", "overlaps", "pair_sort",
    "save_dataset", "save_queries",
]
