"""Value types shared by the solver, inference and persistence layers."""
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

# UCM-LU regime: K = 200, kNN = 10, alpha = 2^-4, beta = 2^-4, delta = 2^2
DEFAULT_ALPHA = 2.0**-4
DEFAULT_BETA = 2.0**-4
DEFAULT_DELTA = 2.0**2
DEFAULT_DICT_SIZE = 200
DEFAULT_KNN = 10


@dataclass(frozen=True)
class HyperParams:
    """Solver settings.

    ``delta`` weights the code-smoothness term, ``beta`` the label terms and
    ``alpha`` the l1 penalty (which enters the objective as ``2 * alpha``).
    """

    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    delta: float = DEFAULT_DELTA
    dict_size: int = DEFAULT_DICT_SIZE
    knn: int = DEFAULT_KNN
    max_iter: int = 100
    rel_tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        for name in ("alpha", "beta", "delta"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidArgumentError(f"{name} must be finite and >= 0, got {v}")
        for name in ("dict_size", "knn", "max_iter"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise InvalidArgumentError(f"{name} must be a positive integer, got {v}")
        if not self.rel_tol > 0:
            raise InvalidArgumentError(f"rel_tol must be > 0, got {self.rel_tol}")
        if int(self.seed) != self.seed:
            raise InvalidArgumentError(f"seed must be an integer, got {self.seed}")


@dataclass(frozen=True)
class LabelPrior:
    """Initial label embedding: one-hot columns for labeled samples, 0.5 elsewhere."""

    o: np.ndarray
    labeled_mask: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.o, dtype=np.float64)
        mask = np.asarray(self.labeled_mask, dtype=bool)
        if o.ndim != 2 or mask.shape != (o.shape[1],):
            raise InvalidArgumentError("prior matrix and mask shapes disagree")
        lab = o[:, mask]
        if lab.size and not (
            np.all((lab == 0) | (lab == 1)) and np.all(lab.sum(axis=0) == 1)
        ):
            raise InvalidArgumentError("labeled prior columns must be one-hot")
        if not np.all(o[:, ~mask] == 0.5):
            raise InvalidArgumentError("unlabeled prior columns must be all 0.5")
        object.__setattr__(self, "o", o)
        object.__setattr__(self, "labeled_mask", mask)

    @property
    def n_classes(self):
        return self.o.shape[0]

    @property
    def n_samples(self):
        return self.o.shape[1]

    @property
    def n_labeled(self):
        return int(self.labeled_mask.sum())

    @property
    def labels(self):
        """Class index per sample, -1 for unlabeled ones."""
        out = np.full(self.n_samples, -1, dtype=np.int64)
        out[self.labeled_mask] = np.argmax(self.o[:, self.labeled_mask], axis=0)
        return out


@dataclass
class ModelState:
    """Dictionary ``d`` (dim x K), codes ``s`` (K x N), classifier ``b`` (C x K)
    and soft labels ``f`` (C x N).

    For models trained with fixed labels ``f`` holds the classifier
    responses ``b @ s`` so transductive prediction works the same way.
    """

    d: np.ndarray
    s: np.ndarray
    b: np.ndarray
    f: np.ndarray
    prior: LabelPrior | None = None
    loss_history: list = field(default_factory=list)
    initial_loss: float | None = None
    variant: str = "dynamic"
    notes: list = field(default_factory=list)

    @property
    def dict_size(self):
        return self.d.shape[1]

    @property
    def n_classes(self):
        return self.b.shape[0]

    def note(self, message):
        if message not in self.notes:
            self.notes.append(message)
