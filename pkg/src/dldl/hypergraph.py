"""kNN hypergraph over training samples and its normalized Laplacian."""
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DegenerateHypergraphError, InvalidArgumentError
from .matrix import as_matrix

SIGMA_FLOOR = 1e-12


@dataclass(frozen=True)
class Hypergraph:
    """Weighted hypergraph in incidence form.

    ``incidence`` is vertices x hyperedges, ``edge_weights`` holds the diagonal
    of the hyperedge weight matrix. ``sigma`` and ``knn`` are only meaningful
    for graphs produced by :func:`build_knn_hypergraph`.
    """

    incidence: np.ndarray
    edge_weights: np.ndarray
    sigma: float = 1.0
    knn: int = 0

    @property
    def n_vertices(self):
        return self.incidence.shape[0]

    @property
    def n_edges(self):
        return self.incidence.shape[1]

    @property
    def edge_degrees(self):
        return self.incidence.sum(axis=0)

    @property
    def vertex_degrees(self):
        return self.incidence @ self.edge_weights


def knn_members(x, k):
    """Neighbour indices for each sample, nearest first, ties to the smaller index.

    Returns ``(members, dist)`` where ``members[i]`` are the ``k`` nearest
    other samples of column ``i`` and ``dist`` the full pairwise distance
    matrix.
    """
    n = x.shape[1]
    dist = cdist(x.T, x.T, metric="euclidean")
    members = np.empty((n, k), dtype=np.intp)
    for i in range(n):
        others = np.delete(np.arange(n), i)
        order = np.argsort(dist[i, others], kind="stable")
        members[i] = others[order[:k]]
    return members, dist


def build_knn_hypergraph(features, k):
    """One hyperedge per sample: the sample itself plus its ``k`` nearest neighbours.

    Membership strength is ``exp(-(dist / sigma) ** 2)`` where ``sigma`` is the
    mean neighbour-to-centroid distance over all hyperedges (1 if all points
    coincide). Hyperedge weights are all one.
    """
    x = as_matrix(features, "features")
    n = x.shape[1]
    if n < 2:
        raise InvalidArgumentError("need at least 2 samples to build a hypergraph")
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= n - 1:
        raise InvalidArgumentError(f"knn must be in [1, {n - 1}], got {k}")
    k = int(k)

    members, dist = knn_members(x, k)
    rows = np.arange(n)[:, None]
    neighbour_dist = dist[rows, members]
    sigma = float(neighbour_dist.mean())
    if sigma < SIGMA_FLOOR:
        sigma = 1.0

    h = np.zeros((n, n))
    # column e is the hyperedge centred on sample e
    h[members, rows] = np.exp(-((neighbour_dist / sigma) ** 2))
    h[np.arange(n), np.arange(n)] = 1.0
    return Hypergraph(incidence=h, edge_weights=np.ones(n), sigma=sigma, knn=k)


def compute_laplacian(g):
    """Normalized Laplacian ``I - Dv^-1/2 H W De^-1 H^T Dv^-1/2``, exactly symmetric."""
    h = as_matrix(g.incidence, "incidence")
    w = np.asarray(g.edge_weights, dtype=np.float64)
    if w.shape != (h.shape[1],):
        raise InvalidArgumentError("edge_weights length must match the number of hyperedges")
    if np.any(h < 0) or np.any(w <= 0):
        raise InvalidArgumentError("incidence must be non-negative and edge weights positive")
    de = h.sum(axis=0)
    dv = h @ w
    if np.any(de <= 0):
        raise DegenerateHypergraphError(f"{int(np.sum(de <= 0))} hyperedge(s) with zero degree")
    if np.any(dv <= 0):
        raise DegenerateHypergraphError(f"{int(np.sum(dv <= 0))} vertex(es) with zero degree")

    scaled = h * np.sqrt(w / de)[None, :] / np.sqrt(dv)[:, None]
    theta = scaled @ scaled.T
    lap = np.eye(h.shape[0]) - theta
    return 0.5 * (lap + lap.T)


def graph_laplacian_of_edges(edges, n):
    """Laplacian of the degree-2 hypergraph equivalent to a simple graph."""
    edges = list(edges)
    h = np.zeros((n, len(edges)))
    for e, (u, v) in enumerate(edges):
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidArgumentError(f"edge ({u}, {v}) out of range for {n} vertices")
        if u == v:
            raise InvalidArgumentError(f"self-pair ({u}, {v}) is not a graph edge")
        h[u, e] = 1.0
        h[v, e] = 1.0
    if not edges:
        raise DegenerateHypergraphError("empty edge list leaves every vertex isolated")
    return compute_laplacian(Hypergraph(incidence=h, edge_weights=np.ones(len(edges))))


def summarize(g, lap=None, eigenvalues=False):
    """Plain-text diagnostic summary of a hypergraph."""
    dv = g.vertex_degrees
    de = g.edge_degrees
    lines = [
        f"vertices: {g.n_vertices}",
        f"hyperedges: {g.n_edges}",
        f"knn: {g.knn}",
        f"sigma: {g.sigma:.6g}",
        f"vertex degree min/mean/max: {dv.min():.6g} {dv.mean():.6g} {dv.max():.6g}",
        f"edge degree min/mean/max: {de.min():.6g} {de.mean():.6g} {de.max():.6g}",
    ]
    if eigenvalues:
        if lap is None:
            lap = compute_laplacian(g)
        ev = np.linalg.eigvalsh(lap)
        lines.append(f"laplacian eigenvalue min/max: {ev[0]:.6g} {ev[-1]:.6g}")
    return "\n".join(lines)
