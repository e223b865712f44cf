from .frechet import (LABEL, FeatureExtractor, frechet_distance, frechet_diversity, gaussian_fit, ledoit_wolf,
                      sqrtm_psd)
from .ged import MAX_NODES, compatibility, graph_edit_distance, set_compatibility
from .iou import macro_iou, micro_iou, per_type_iou
from .report import MetricReport, evaluate

__all__ = ["LABEL", "FeatureExtractor", "frechet_distance", "frechet_diversity", "gaussian_fit",
           "ledoit_wolf", "sqrtm_psd", "MAX_NODES", "compatibility", "graph_edit_distance",
           "set_compatibility", "macro_iou", "micro_iou", "per_type_iou", "MetricReport", "evaluate"]
