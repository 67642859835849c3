"""Dynamic label dictionary learning.

Semi-supervised sparse dictionary learning in which a soft-label matrix for
the unlabeled samples is optimized jointly with the dictionary, the sparse
codes and a linear classifier, all tied together by a kNN hypergraph
Laplacian.
"""
from .errors import (ConsistencyError, DegenerateColumnError, DegenerateHypergraphError,
                     DLDLError, FormatError, InvalidArgumentError, SingularSystemError,
                     UnsupportedVersionError)
from .hypergraph import Hypergraph, build_knn_hypergraph, compute_laplacian, graph_laplacian_of_edges
from .inference import (PredictionReport, encode, encode_batch, evaluate, predict_inductive,
                        predict_transductive)
from .io import build_prior, load_features, load_labels, load_model, save_model
from .model import HyperParams, LabelPrior, ModelState
from .solver import fit, fit_fixed_label, objective_value

__version__ = "0.1.0"
