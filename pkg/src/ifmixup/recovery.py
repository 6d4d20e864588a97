"""Constructive recovery of the source pair from a mixed graph.

A mixed edge matrix built from two distinct binary graphs takes values only
in {0, lam, 1-lam, 1}. Whenever lam != 0.5 the equation

    s * e + (1 - s) * e' = e_mixed      (e, e' binary, symmetric, zero diag)

has exactly two solutions, mirror images of each other under
(s, e, e') -> (1-s, e', e). Clustering the distinct off-diagonal values
therefore reconstructs both source edge matrices together with the mixing
ratio.

Node features decompose the same way provided the dataset's feature
vocabulary V is finite. Two constructive modes are implemented:

* independent mode - V itself is linearly independent. Each mixed row has a
  unique coefficient vector over V; its nonzero pattern must be one of
  {1} (identical sources), {s} or {1-s} (one source is a dummy row), or
  {s, 1-s} (two distinct vocabulary rows), which pins down both sources.
* basis mode - only the collection of coefficient matrices T (one per
  training graph, features = T @ B for a basis B of SPAN(V)) is linearly
  independent. The mixed coefficient matrix is recovered by projection onto
  B and then matched against s*T + (1-s)*T' over all training pairs; the
  exhaustive search doubles as a correctness oracle at desk scale.

``recover_pair`` chains the two steps and strips trailing dummy rows, which
exactly inverts the padding applied before mixing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import (
    FeatureBasis,
    GraphDataset,
    NodeFeaturedGraph,
    check_linear_independence,
    coefficients_in_basis,
    _pad_rows,
)
from .mixing import BetaParams, mix_labels, mix_pair, sample_lambda

DEFAULT_TOL = 1e-9

# Mixing ratios closer to 0.5 than this are resampled in audited streams;
# closer than tol they are structurally unrecoverable.
HALF_GUARD = 1e-6


class RecoveryError(ValueError):
    """The input is not decodable as a mix of two binary-edge sources."""


@dataclass(eq=False)
class EdgeSolution:
    """One solution (s, e, e') of the edge equation, with the pair partition.

    ``partition`` maps the keys "00", "01", "10", "11" to the off-diagonal
    node pairs (i, j) on which (e, e') equals (0,0), (0,1), (1,0), (1,1).
    Both orientations of each pair are listed. ``s`` is None in the
    degenerate identical-source case.
    """

    s: float | None
    e: np.ndarray
    e_prime: np.ndarray
    partition: dict[str, list[tuple[int, int]]]


@dataclass(eq=False)
class EdgeSolutionSet:
    """The full solution set: two mirrored solutions, or one degenerate one.

    ``degenerate`` is set when the mixed matrix is itself binary, i.e. the
    sources had identical edges; then e = e' = e_mixed and s is undetermined
    by the edges alone.
    """

    solutions: list[EdgeSolution]
    degenerate: bool = False


@dataclass(eq=False)
class RecoveredPair:
    """The decoded source pair; remixing with ``lam`` reproduces the input.

    ``lam`` is None only when edges and features are both identical between
    the sources, in which case every ratio reproduces the mix.
    """

    graph_a: NodeFeaturedGraph
    graph_b: NodeFeaturedGraph
    lam: float | None
    sources_identical: bool = False


def _cluster_values(values: np.ndarray, tol: float) -> list[float]:
    """Distinct values present, grouping anything within tol of a seen value."""
    centers: list[float] = []
    for x in np.sort(values):
        if not centers or x - centers[-1] > tol:
            centers.append(float(x))
    return centers


def edge_solutions(e_mixed: np.ndarray, tol: float = DEFAULT_TOL) -> EdgeSolutionSet:
    """Solve s*e + (1-s)*e' = e_mixed for binary symmetric e, e' and scalar s.

    Returns the two mirrored solutions ordered with s < 0.5 first, or the
    single degenerate solution when e_mixed is binary. Raises RecoveryError
    when the value set cannot come from mixing two binary matrices, or when
    the ratio is indistinguishable from 0.5.
    """
    e_mixed = np.asarray(e_mixed, dtype=np.float64)
    n = e_mixed.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    values = e_mixed[iu, ju]

    centers = _cluster_values(values, tol)
    soft = [c for c in centers if c > tol and c < 1.0 - tol]
    if len(centers) > 4:
        raise RecoveryError(
            f"{len(centers)} distinct edge values; a mix of two binary matrices has at most 4"
        )
    if len(soft) > 2:
        raise RecoveryError(f"edge values {soft} cannot all come from one mixing ratio")

    if not soft:
        e = np.where(e_mixed > 0.5, 1.0, 0.0)
        partition = _partition(e, e, iu, ju)
        return EdgeSolutionSet([EdgeSolution(None, e, e.copy(), partition)], degenerate=True)

    if len(soft) == 2 and abs(soft[0] + soft[1] - 1.0) > tol:
        raise RecoveryError(
            f"edge values {soft[0]} and {soft[1]} do not pair to a single mixing ratio"
        )
    s_lo = min(soft[0], 1.0 - soft[-1]) if len(soft) == 2 else min(soft[0], 1.0 - soft[0])
    if abs(s_lo - 0.5) < tol:
        raise RecoveryError("mixing ratio indistinguishable from 0.5")

    solutions = []
    for s in (s_lo, 1.0 - s_lo):
        # Under this s: values near s came from (e=1, e'=0), near 1-s from (0, 1).
        e = np.where(np.abs(e_mixed - 1.0) <= tol, 1.0, 0.0)
        e_p = e.copy()
        e[np.abs(e_mixed - s) <= tol] = 1.0
        e_p[np.abs(e_mixed - (1.0 - s)) <= tol] = 1.0
        np.fill_diagonal(e, 0.0)
        np.fill_diagonal(e_p, 0.0)
        residual = np.max(np.abs(s * e + (1.0 - s) * e_p - e_mixed))
        if residual > tol:
            raise RecoveryError(f"edge values inconsistent with ratio {s}: residual {residual:.3e}")
        solutions.append(EdgeSolution(s, e, e_p, _partition(e, e_p, iu, ju)))
    return EdgeSolutionSet(solutions, degenerate=False)


def _partition(
    e: np.ndarray, e_p: np.ndarray, iu: np.ndarray, ju: np.ndarray
) -> dict[str, list[tuple[int, int]]]:
    part: dict[str, list[tuple[int, int]]] = {"00": [], "01": [], "10": [], "11": []}
    for i, j in zip(iu.tolist(), ju.tolist()):
        key = f"{int(e[i, j])}{int(e_p[i, j])}"
        part[key].append((i, j))
        part[key].append((j, i))
    return part


def recover_features_independent(
    v_mixed: np.ndarray,
    s: float,
    vocabulary: np.ndarray,
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Decode v_mixed = s*v + (1-s)*v' when the vocabulary is independent.

    Every row of v and v' must lie in the vocabulary extended with the zero
    row. Raises RecoveryError when some row admits no such decomposition.
    """
    v_mixed = np.atleast_2d(np.asarray(v_mixed, dtype=np.float64))
    vocabulary = np.atleast_2d(np.asarray(vocabulary, dtype=np.float64))
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    if abs(s - 0.5) <= tol:
        raise RecoveryError("s = 0.5 makes the two feature assignments indistinguishable")
    ok, _ = check_linear_independence(vocabulary, tol)
    if not ok:
        raise RecoveryError("feature vocabulary is not linearly independent")

    # Unique coefficients of each row over the vocabulary, by projection.
    coeff = coefficients_in_basis(v_mixed, vocabulary)
    residual = np.max(np.abs(coeff @ vocabulary - v_mixed))
    if residual > tol:
        raise RecoveryError(
            f"mixed features leave SPAN(V): projection residual {residual:.3e}"
        )

    v = np.zeros_like(v_mixed)
    v_p = np.zeros_like(v_mixed)
    for r, c in enumerate(coeff):
        nz = np.flatnonzero(np.abs(c) > tol)
        if nz.size == 0:
            continue  # zero row: both sources dummy
        if nz.size == 1:
            u = vocabulary[nz[0]]
            cval = c[nz[0]]
            if abs(cval - 1.0) <= tol:
                v[r] = u
                v_p[r] = u
            elif abs(cval - s) <= tol:
                v[r] = u
            elif abs(cval - (1.0 - s)) <= tol:
                v_p[r] = u
            else:
                raise RecoveryError(
                    f"row {r}: coefficient {cval} matches neither 1, s nor 1-s"
                )
        elif nz.size == 2:
            ca, cb = c[nz[0]], c[nz[1]]
            if abs(ca - s) <= tol and abs(cb - (1.0 - s)) <= tol:
                v[r] = vocabulary[nz[0]]
                v_p[r] = vocabulary[nz[1]]
            elif abs(ca - (1.0 - s)) <= tol and abs(cb - s) <= tol:
                v[r] = vocabulary[nz[1]]
                v_p[r] = vocabulary[nz[0]]
            else:
                raise RecoveryError(
                    f"row {r}: coefficients ({ca}, {cb}) are not (s, 1-s) in either order"
                )
        else:
            raise RecoveryError(
                f"row {r}: {nz.size} vocabulary components; a two-source mix has at most 2"
            )
    return v, v_p


def recover_features_basis(
    v_mixed: np.ndarray,
    s: float,
    basis: FeatureBasis,
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Decode v_mixed = s*v + (1-s)*v' when the coefficient collection is independent.

    Projects the mixed rows onto the span basis to obtain the mixed
    coefficient matrix, then searches the training collection exhaustively
    for the unique source pair (T, T') with s*T + (1-s)*T' matching it.
    """
    v_mixed = np.atleast_2d(np.asarray(v_mixed, dtype=np.float64))
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    if not basis.t_set_independent():
        raise RecoveryError("coefficient collection is not linearly independent")

    t_mixed = coefficients_in_basis(v_mixed, basis.basis)
    residual = np.max(np.abs(t_mixed @ basis.basis - v_mixed))
    if residual > tol:
        raise RecoveryError(
            f"mixed features leave SPAN(V): projection residual {residual:.3e}"
        )

    n = v_mixed.shape[0]
    candidates = [_pad_rows(t, n) for t in basis.t_set if t.shape[0] <= n]
    matches = []
    for ta in candidates:
        for tb in candidates:
            if np.max(np.abs(s * ta + (1.0 - s) * tb - t_mixed)) <= tol:
                matches.append((ta, tb))
    if not matches:
        raise RecoveryError("no training coefficient pair reproduces the mixed features")
    if len(matches) > 1:
        raise RecoveryError(f"{len(matches)} coefficient pairs match; decomposition not unique")
    ta, tb = matches[0]
    return ta @ basis.basis, tb @ basis.basis


def _soft_coefficient_values(coeff: np.ndarray, tol: float) -> list[float]:
    flat = coeff.ravel()
    soft = flat[(np.abs(flat) > tol) & (np.abs(flat - 1.0) > tol)]
    return _cluster_values(soft, tol) if soft.size else []


def _infer_ratio_from_features(
    v_mixed: np.ndarray, basis: FeatureBasis, mode: str, tol: float
) -> float | None:
    """The mixing ratio implied by the feature matrix alone, or None if the
    feature sides are identical too. Used when the edge step is degenerate."""
    if mode == "independent":
        coeff = coefficients_in_basis(v_mixed, basis.vocabulary)
        if np.max(np.abs(coeff @ basis.vocabulary - v_mixed)) > tol:
            raise RecoveryError("mixed features leave SPAN(V)")
        soft = _soft_coefficient_values(coeff, tol)
    else:
        t_mixed = coefficients_in_basis(v_mixed, basis.basis)
        if np.max(np.abs(t_mixed @ basis.basis - v_mixed)) > tol:
            raise RecoveryError("mixed features leave SPAN(V)")
        soft = _solve_ratio_from_t(t_mixed, basis, tol)
    if not soft:
        return None
    if len(soft) == 1:
        s = soft[0]
    elif len(soft) == 2 and abs(soft[0] + soft[1] - 1.0) <= tol:
        s = soft[0]
    else:
        raise RecoveryError(f"feature coefficients {soft} imply no single mixing ratio")
    if abs(s - 0.5) < tol:
        raise RecoveryError("mixing ratio indistinguishable from 0.5")
    return min(s, 1.0 - s)


def _solve_ratio_from_t(t_mixed: np.ndarray, basis: FeatureBasis, tol: float) -> list[float]:
    """Candidate ratios s solving t_mixed = s*T + (1-s)*T' over the training pairs."""
    n = t_mixed.shape[0]
    candidates = [_pad_rows(t, n) for t in basis.t_set if t.shape[0] <= n]
    found: list[float] = []
    for ta in candidates:
        for tb in candidates:
            diff = ta - tb
            mask = np.abs(diff) > tol
            if not mask.any():
                continue
            ratios = (t_mixed[mask] - tb[mask]) / diff[mask]
            s = float(ratios.flat[0])
            if not 0.0 < s < 1.0:
                continue
            if np.max(np.abs(ratios - s)) > tol:
                continue
            if np.max(np.abs(s * ta + (1.0 - s) * tb - t_mixed)) <= tol:
                found.append(s)
    return _cluster_values(np.array(found), tol) if found else []


def strip_dummy_nodes(g: NodeFeaturedGraph, tol: float = DEFAULT_TOL) -> NodeFeaturedGraph:
    """Remove trailing zero-feature, zero-degree nodes (inverts pad_graph)."""
    n = g.n
    while n > 0:
        i = n - 1
        if np.max(np.abs(g.v[i])) <= tol and not np.any(g.e[i, :n] != 0.0):
            n -= 1
        else:
            break
    if n == g.n:
        return g
    return NodeFeaturedGraph(g.v[:n].copy(), g.e[:n, :n].copy())


def recover_pair(
    g_mixed: NodeFeaturedGraph,
    basis: FeatureBasis,
    mode: str = "independent",
    tol: float = DEFAULT_TOL,
) -> RecoveredPair:
    """Decode a mixed graph back into its two sources and the mixing ratio.

    The pair is inherently unordered: (s, A, B) and (1-s, B, A) describe the
    same mix, and the canonical result carries s < 0.5. When the sources
    were identical the mix equals the source and ``lam`` is None.
    """
    if mode not in ("independent", "basis"):
        raise ValueError(f"unknown recovery mode {mode!r}")

    edge_set = edge_solutions(g_mixed.e, tol)
    if not edge_set.degenerate:
        sol = edge_set.solutions[0]  # canonical: s < 0.5
        s = float(sol.s)
        va, vb = _recover_features(g_mixed.v, s, basis, mode, tol)
        ga = NodeFeaturedGraph(va, sol.e)
        gb = NodeFeaturedGraph(vb, sol.e_prime)
        acting_s = s
        identical = False
    else:
        sol = edge_set.solutions[0]
        s_feat = _infer_ratio_from_features(g_mixed.v, basis, mode, tol)
        if s_feat is None:
            ga = NodeFeaturedGraph(g_mixed.v.copy(), sol.e)
            gb = NodeFeaturedGraph(g_mixed.v.copy(), sol.e_prime)
            return RecoveredPair(
                strip_dummy_nodes(ga, tol), strip_dummy_nodes(gb, tol), None, True
            )
        va, vb = _recover_features(g_mixed.v, s_feat, basis, mode, tol)
        ga = NodeFeaturedGraph(va, sol.e)
        gb = NodeFeaturedGraph(vb, sol.e_prime)
        acting_s = s_feat
        identical = False

    remix_e = acting_s * ga.e + (1.0 - acting_s) * gb.e
    remix_v = acting_s * ga.v + (1.0 - acting_s) * gb.v
    drift = max(np.max(np.abs(remix_e - g_mixed.e)), np.max(np.abs(remix_v - g_mixed.v)))
    if drift > 10 * tol:
        raise RecoveryError(f"edge and feature recoveries disagree: remix residual {drift:.3e}")

    return RecoveredPair(
        strip_dummy_nodes(ga, tol), strip_dummy_nodes(gb, tol), acting_s, identical
    )


def _recover_features(
    v_mixed: np.ndarray, s: float, basis: FeatureBasis, mode: str, tol: float
) -> tuple[np.ndarray, np.ndarray]:
    if mode == "independent":
        return recover_features_independent(v_mixed, s, basis.vocabulary, tol)
    return recover_features_basis(v_mixed, s, basis, tol)


@dataclass
class IntrusionAuditReport:
    """Outcome of an empirical intrusion audit over random mixes."""

    dataset: str
    trials: int
    mode: str | None
    assumption_ok: bool
    collisions: int = 0
    recovery_failures: int = 0
    first_failure: str | None = None

    def ok(self) -> bool:
        return self.assumption_ok and self.collisions == 0 and self.recovery_failures == 0

    def to_text(self) -> str:
        lines = [
            f"intrusion audit: {self.dataset}",
            f"  trials:             {self.trials}",
            f"  feature assumption: "
            + (f"satisfied ({self.mode} mode)" if self.assumption_ok else "VIOLATED - audit skipped"),
        ]
        if self.assumption_ok:
            lines.append(f"  label collisions:   {self.collisions}")
            lines.append(f"  recovery failures:  {self.recovery_failures}")
            if self.first_failure:
                lines.append(f"  first failure:      {self.first_failure}")
            lines.append(f"  verdict:            {'intrusion-free' if self.ok() else 'FAILED'}")
        return "\n".join(lines)


def _graphs_equal(a: NodeFeaturedGraph, b: NodeFeaturedGraph, tol: float) -> bool:
    return (
        a.n == b.n
        and np.array_equal(a.e, b.e)
        and float(np.max(np.abs(a.v - b.v), initial=0.0)) <= tol
    )


def intrusion_audit(
    ds: GraphDataset,
    trials: int,
    params: BetaParams,
    rng: np.random.Generator,
    tol: float = DEFAULT_TOL,
) -> IntrusionAuditReport:
    """Mix random pairs and verify no label-conflicting collision can arise.

    Each trial draws a pair and a ratio, then checks (a) the mixed graph is
    not bit-identical to any training graph carrying a different label, and
    (b) the decoder returns exactly the source pair. Failures are counted,
    not raised. The audit is skipped when neither feature-invertibility
    assumption holds for the dataset.
    """
    from .graphs import feature_vocabulary, pad_graph

    basis = feature_vocabulary(ds)
    if basis.vocabulary_independent():
        mode = "independent"
    elif basis.t_set_independent():
        mode = "basis"
    else:
        return IntrusionAuditReport(ds.name, trials, None, assumption_ok=False)

    report = IntrusionAuditReport(ds.name, trials, mode, assumption_ok=True)
    items = ds.items
    for trial in range(trials):
        ia, ib = int(rng.integers(len(items))), int(rng.integers(len(items)))
        lam = sample_lambda(params, rng)
        while abs(lam - 0.5) < HALF_GUARD:
            lam = sample_lambda(params, rng)
        ga, ya = items[ia]
        gb, yb = items[ib]
        mixed = mix_pair(ga, gb, lam)
        mixed_label = mix_labels(ya, yb, lam)

        for g_train, y_train in items:
            if g_train.n > mixed.n:
                continue
            padded = pad_graph(g_train, mixed.n)
            if np.array_equal(padded.e, mixed.e) and np.array_equal(padded.v, mixed.v):
                if not np.array_equal(y_train.p, mixed_label.p):
                    report.collisions += 1
                    if report.first_failure is None:
                        report.first_failure = (
                            f"trial {trial}: mix({ia}, {ib}, lam={lam}) collides with a "
                            f"training graph of a different label"
                        )
                    break

        try:
            rec = recover_pair(mixed, basis, mode, tol)
        except RecoveryError as exc:
            report.recovery_failures += 1
            if report.first_failure is None:
                report.first_failure = f"trial {trial}: pair ({ia}, {ib}), lam={lam}: {exc}"
            continue
        direct = (
            rec.lam is not None
            and abs(rec.lam - lam) <= tol
            and _graphs_equal(rec.graph_a, ga, tol)
            and _graphs_equal(rec.graph_b, gb, tol)
        )
        mirrored = (
            rec.lam is not None
            and abs(rec.lam - (1.0 - lam)) <= tol
            and _graphs_equal(rec.graph_a, gb, tol)
            and _graphs_equal(rec.graph_b, ga, tol)
        )
        identical_ok = rec.sources_identical and _graphs_equal(ga, gb, tol) and _graphs_equal(
            rec.graph_a, ga, tol
        )
        if not (direct or mirrored or identical_ok):
            report.recovery_failures += 1
            if report.first_failure is None:
                report.first_failure = (
                    f"trial {trial}: pair ({ia}, {ib}), lam={lam}: recovered pair differs"
                )
    return report
