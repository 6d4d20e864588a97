"""Dense node-featured graphs and the feature-vocabulary machinery.

A graph is stored as the pair ``(v, e)``: an ``n x d`` node-feature matrix
and a symmetric ``n x n`` edge-weight matrix with zero diagonal and entries
in ``[0, 1]``. Source datasets are binary (weights in ``{0, 1}``); soft
weights only ever arise from mixing two binary graphs.

The feature-vocabulary half of this module extracts the finite set ``V`` of
distinct node-feature rows of a dataset, a basis of ``SPAN(V)``, and the
per-graph coefficient matrices expressing every feature matrix in that
basis. Linear independence of ``V`` (or of the coefficient collection) is
what makes mixed graphs uniquely decodable; see :mod:`ifmixup.recovery`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Pivot tolerance for rank decisions and basis reconstruction. Benchmark
# feature sets are one-hot dominated, so double precision row reduction is
# effectively exact at this threshold.
RANK_TOL = 1e-9

LABEL_SUM_TOL = 1e-9


@dataclass(eq=False)
class NodeFeaturedGraph:
    """A graph given by node features ``v`` (n x d) and edge weights ``e`` (n x n)."""

    v: np.ndarray
    e: np.ndarray

    def __post_init__(self) -> None:
        self.v = np.asarray(self.v, dtype=np.float64)
        self.e = np.asarray(self.e, dtype=np.float64)
        if self.v.ndim != 2:
            raise ValueError(f"node features must be 2-D, got shape {self.v.shape}")
        if self.e.shape != (self.v.shape[0], self.v.shape[0]):
            raise ValueError(
                f"edge matrix shape {self.e.shape} does not match node count {self.v.shape[0]}"
            )

    @property
    def n(self) -> int:
        return self.v.shape[0]

    @property
    def d(self) -> int:
        return self.v.shape[1]


def is_binary(g: NodeFeaturedGraph) -> bool:
    """True when every edge weight is exactly 0 or 1."""
    return bool(np.all((g.e == 0.0) | (g.e == 1.0)))


@dataclass(eq=False, frozen=True)
class LabelDistribution:
    """Probability vector over the class set; one-hot for source data."""

    p: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", np.asarray(self.p, dtype=np.float64))
        if self.p.ndim != 1:
            raise ValueError("label distribution must be a vector")
        if np.any(self.p < 0):
            raise ValueError("label distribution has negative entries")
        if abs(float(self.p.sum()) - 1.0) > LABEL_SUM_TOL:
            raise ValueError(f"label distribution sums to {self.p.sum()}, not 1")

    @classmethod
    def one_hot(cls, index: int, num_classes: int) -> "LabelDistribution":
        p = np.zeros(num_classes)
        p[index] = 1.0
        return cls(p)

    @property
    def num_classes(self) -> int:
        return self.p.shape[0]

    def is_one_hot(self) -> bool:
        return bool(np.sum(self.p == 1.0) == 1 and np.sum(self.p == 0.0) == self.p.size - 1)

    def argmax(self) -> int:
        return int(np.argmax(self.p))


@dataclass
class GraphDataset:
    """A list of (graph, label) pairs sharing feature dimension and class count."""

    items: list[tuple[NodeFeaturedGraph, LabelDistribution]]
    num_classes: int
    feature_dim: int
    name: str = ""

    def __len__(self) -> int:
        return len(self.items)

    def graphs(self) -> list[NodeFeaturedGraph]:
        return [g for g, _ in self.items]

    def labels(self) -> list[LabelDistribution]:
        return [y for _, y in self.items]


@dataclass
class FeatureBasis:
    """The feature vocabulary of a dataset and its span basis.

    ``vocabulary`` holds the distinct nonzero feature rows (V), sorted
    lexicographically for determinism; ``vocabulary_star`` appends the zero
    row (V*), which dummy nodes contribute. ``basis`` is an ``m x d`` matrix
    of linearly independent rows spanning SPAN(V), and ``coeffs[i]`` is the
    coefficient matrix T of dataset graph i with ``v_i = T @ basis``.
    ``t_set`` is the deduplicated collection of coefficient matrices used by
    basis-mode recovery.
    """

    vocabulary: np.ndarray
    vocabulary_star: np.ndarray
    rank: int
    basis: np.ndarray
    coeffs: list[np.ndarray]
    t_set: list[np.ndarray] = field(default_factory=list)

    @property
    def feature_dim(self) -> int:
        return self.vocabulary.shape[1]

    def vocabulary_independent(self) -> bool:
        ok, _ = check_linear_independence(self.vocabulary)
        return ok

    def t_set_independent(self) -> bool:
        """Independence of the coefficient collection, zero-padded to a common size."""
        if not self.t_set:
            return False
        n_max = max(t.shape[0] for t in self.t_set)
        flat = np.stack([_pad_rows(t, n_max).ravel() for t in self.t_set])
        ok, _ = check_linear_independence(flat)
        return ok


def validate_graph(g: NodeFeaturedGraph) -> list[str]:
    """Check the stored-graph invariants; returns a list of violations (empty = ok)."""
    violations: list[str] = []
    if g.e.shape[0] != g.e.shape[1] or g.e.shape[0] != g.v.shape[0]:
        violations.append(
            f"dimension mismatch: v is {g.v.shape}, e is {g.e.shape}"
        )
        return violations
    asym = np.argwhere(g.e != g.e.T)
    if asym.size:
        i, j = asym[0]
        violations.append(f"asymmetric at ({i},{j}) ({asym.shape[0]} entries total)")
    diag = np.flatnonzero(np.diag(g.e) != 0.0)
    if diag.size:
        violations.append(f"nonzero diagonal at node {diag[0]} ({diag.size} nodes total)")
    bad = ~((g.e >= 0.0) & (g.e <= 1.0))
    out = np.argwhere(bad)
    if out.size:
        i, j = out[0]
        violations.append(
            f"weight out of [0,1] at ({i},{j}): {g.e[i, j]} ({out.shape[0]} entries total)"
        )
    return violations


def pad_graph(g: NodeFeaturedGraph, n: int) -> NodeFeaturedGraph:
    """Append disconnected zero-feature dummy nodes until the graph has n nodes."""
    if n < g.n:
        raise ValueError(f"cannot pad {g.n}-node graph down to {n} nodes")
    if n == g.n:
        return g
    v = np.zeros((n, g.d))
    v[: g.n] = g.v
    e = np.zeros((n, n))
    e[: g.n, : g.n] = g.e
    return NodeFeaturedGraph(v, e)


def pad_pair(
    ga: NodeFeaturedGraph, gb: NodeFeaturedGraph
) -> tuple[NodeFeaturedGraph, NodeFeaturedGraph]:
    """Equalize node counts by appending dummy nodes to the smaller graph.

    Dummy nodes carry all-zero features and no edges, and are appended after
    the existing nodes so that original node IDs stay stable.
    """
    if ga.d != gb.d:
        raise ValueError(f"feature dimension mismatch: {ga.d} vs {gb.d}")
    n = max(ga.n, gb.n)
    return pad_graph(ga, n), pad_graph(gb, n)


def permute_nodes(g: NodeFeaturedGraph, perm: np.ndarray) -> NodeFeaturedGraph:
    """Relabel nodes: row i of the result is node perm[i] of the input."""
    perm = np.asarray(perm)
    if sorted(perm.tolist()) != list(range(g.n)):
        raise ValueError("perm must be a permutation of range(n)")
    return NodeFeaturedGraph(g.v[perm], g.e[np.ix_(perm, perm)])


def _pad_rows(t: np.ndarray, n: int) -> np.ndarray:
    if t.shape[0] == n:
        return t
    out = np.zeros((n, t.shape[1]))
    out[: t.shape[0]] = t
    return out


def _row_reduce_rank(rows: np.ndarray, tol: float) -> int:
    """Rank by Gaussian elimination with partial pivoting; pivots below tol are zero."""
    m = np.array(rows, dtype=np.float64)
    n_rows, n_cols = m.shape
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = rank + int(np.argmax(np.abs(m[rank:, col])))
        if abs(m[pivot, col]) <= tol:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        m[rank] = m[rank] / m[rank, col]
        below = np.arange(n_rows) != rank
        m[below] -= np.outer(m[below, col], m[rank])
        rank += 1
    return rank


def check_linear_independence(
    rows: np.ndarray | list[np.ndarray], tol: float = RANK_TOL
) -> tuple[bool, int]:
    """Whether the given vectors are linearly independent, plus their rank."""
    m = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if m.size == 0:
        raise ValueError("empty vector set")
    rank = _row_reduce_rank(m, tol)
    return rank == m.shape[0], rank


def independent_row_subset(rows: np.ndarray, tol: float = RANK_TOL) -> list[int]:
    """Indices of a maximal independent subset of rows, greedy in row order."""
    rows = np.asarray(rows, dtype=np.float64)
    chosen: list[int] = []
    echelon: list[np.ndarray] = []
    for i, row in enumerate(rows):
        r = row.astype(np.float64).copy()
        for b in echelon:
            lead = int(np.argmax(np.abs(b)))
            r -= (r[lead] / b[lead]) * b
        if np.max(np.abs(r)) > tol:
            chosen.append(i)
            echelon.append(r)
    return chosen


def coefficients_in_basis(v: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Least-squares coefficients T with v ~= T @ basis (exact when rows of basis
    are independent and v lies in their span)."""
    gram = basis @ basis.T
    return np.linalg.solve(gram, basis @ v.T).T


def feature_vocabulary(ds: GraphDataset) -> FeatureBasis:
    """Extract V, V*, a basis of SPAN(V), and per-graph coefficient matrices.

    Deduplication is exact bitwise equality on feature rows; the zero row is
    excluded from V and appended to V*. The basis is the greedy maximal
    independent subset of V in lexicographic row order, so the result is
    deterministic for a given dataset.
    """
    if not ds.items:
        raise ValueError("empty dataset")
    all_rows = np.concatenate([g.v for g in ds.graphs()], axis=0)
    distinct = np.unique(all_rows, axis=0)
    nonzero = distinct[np.any(distinct != 0.0, axis=1)]
    vocabulary = nonzero
    vocabulary_star = np.concatenate([vocabulary, np.zeros((1, ds.feature_dim))], axis=0)

    basis_idx = independent_row_subset(vocabulary)
    basis = vocabulary[basis_idx]
    rank = len(basis_idx)

    coeffs = []
    for g in ds.graphs():
        t = coefficients_in_basis(g.v, basis)
        recon = np.max(np.abs(t @ basis - g.v))
        if recon > RANK_TOL:
            raise ValueError(f"basis reconstruction residual {recon:.3e} exceeds {RANK_TOL}")
        coeffs.append(t)

    t_set: list[np.ndarray] = []
    seen: set[bytes] = set()
    for t in coeffs:
        key = t.shape[0].to_bytes(4, "little") + t.tobytes()
        if key not in seen:
            seen.add(key)
            t_set.append(t)
    return FeatureBasis(vocabulary, vocabulary_star, rank, basis, coeffs, t_set)


@dataclass
class DegreeStats:
    """Per-dataset summary: graph count, mean node count, mean undirected edges."""

    graph_count: int
    mean_nodes: float
    mean_edges: float
    feature_dim: int
    num_classes: int


def degree_stats(ds: GraphDataset) -> DegreeStats:
    """Mean node and undirected-edge counts over the dataset (an edge counted once)."""
    nodes = [g.n for g in ds.graphs()]
    edges = [float(np.count_nonzero(np.triu(g.e, k=1))) for g in ds.graphs()]
    return DegreeStats(
        graph_count=len(ds),
        mean_nodes=float(np.mean(nodes)),
        mean_edges=float(np.mean(edges)),
        feature_dim=ds.feature_dim,
        num_classes=ds.num_classes,
    )
