"""Weighted-edge GCN and GIN classifiers with exact reverse-mode gradients.

Both layer types consume the dense edge-weight matrix directly, so mixed
graphs with fractional edges flow through unchanged:

    GCN   h_i' = ReLU( W . sum_{j in N(i) u {i}} [e(i,j) / sqrt(dh_j dh_i)] h_j )
          with dh_i = 1 + sum_j e(i,j) and the self-term weight e(i,i) taken
          as 1; optional residual connection added after the activation
          (linear projection when the widths differ).

    GIN   h_i' = MLP( (1 + eps) h_i + sum_j e(i,j) h_j )
          with a trainable eps per layer and a plain Linear/ReLU/.../Linear
          MLP (no activation after the last linear).

Readout is the pooled (sum or mean) final layer for GCN and the
concatenation of every layer's pooled embedding for GIN; a dense head with
dropout on its logits and a softmax produce class probabilities. The loss
is soft-label cross-entropy, linear in the target, so mixed labels plug in
directly.

Forward passes are built on the :mod:`.autodiff` tape; ``model_gradients``
returns the exact gradient of the batch-mean loss for every parameter,
including the GIN eps scalars.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from .autodiff import Tensor, concat, constant, parameter
from .graphs import LabelDistribution, NodeFeaturedGraph

LOG_CLAMP = 1e-12

CHECKPOINT_FORMAT = "ifmixup-checkpoint"
CHECKPOINT_VERSION = 1


@dataclass
class ModelConfig:
    """Architecture hyperparameters shared by init, forward and training."""

    arch: str = "gcn"  # "gcn" | "gin"
    k: int = 2  # message-passing layers
    hidden: int = 16
    dropout: float = 0.0  # applied to the dense head's logits, training only
    readout: str = "sum"  # "sum" | "mean"
    gcn_skip: bool = False
    gin_mlp_depth: int = 2
    gin_mlp_bias: bool = True

    def __post_init__(self) -> None:
        if self.arch not in ("gcn", "gin"):
            raise ValueError(f"arch must be 'gcn' or 'gin', got {self.arch!r}")
        if self.k < 1:
            raise ValueError(f"need at least one layer, got k={self.k}")
        if self.hidden < 1:
            raise ValueError(f"hidden width must be positive, got {self.hidden}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must lie in [0, 1), got {self.dropout}")
        if self.readout not in ("sum", "mean"):
            raise ValueError(f"readout must be 'sum' or 'mean', got {self.readout!r}")
        if self.gin_mlp_depth < 1:
            raise ValueError(f"GIN MLP needs at least one layer, got {self.gin_mlp_depth}")

    def readout_dim(self) -> int:
        """Width of the graph representation fed to the classifier head."""
        return self.k * self.hidden if self.arch == "gin" else self.hidden


@dataclass(eq=False)
class ModelParams:
    """All trainable arrays, keyed by name, plus the shapes they assume."""

    config: ModelConfig
    feature_dim: int
    num_classes: int
    tensors: dict[str, np.ndarray] = field(default_factory=dict)

    def copy(self) -> "ModelParams":
        return ModelParams(
            self.config,
            self.feature_dim,
            self.num_classes,
            {k: v.copy() for k, v in self.tensors.items()},
        )


@dataclass(eq=False)
class ForwardTrace:
    """Everything a forward pass produces, as plain arrays."""

    layer_embeddings: list[np.ndarray]  # h^1 .. h^K, each n x hidden
    pooled: list[np.ndarray]  # per-layer pooled vectors
    h_graph: np.ndarray  # graph representation fed to the head
    logits: np.ndarray
    probs: np.ndarray


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def _bias(rng: np.random.Generator, fan_in: int, size: int) -> np.ndarray:
    # Uniform(-1/sqrt(fan_in), +): exact zeros would park dead ReLU rows
    # precisely on the next layer's kink, making gradients one-sided there.
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=size)


def init_params(
    config: ModelConfig,
    feature_dim: int,
    num_classes: int,
    rng: np.random.Generator,
) -> ModelParams:
    """Glorot-uniform weights, fan-in-scaled uniform biases, zero GIN eps."""
    if feature_dim < 1 or num_classes < 1:
        raise ValueError("feature_dim and num_classes must be positive")
    t: dict[str, np.ndarray] = {}
    f_in = feature_dim
    for layer in range(config.k):
        if config.arch == "gcn":
            t[f"layer{layer}.W"] = _glorot(rng, f_in, config.hidden)
            if config.gcn_skip and f_in != config.hidden:
                t[f"layer{layer}.P"] = _glorot(rng, f_in, config.hidden)
        else:
            t[f"layer{layer}.eps"] = np.zeros(1)
            m_in = f_in
            for m in range(config.gin_mlp_depth):
                t[f"layer{layer}.mlp{m}.W"] = _glorot(rng, m_in, config.hidden)
                if config.gin_mlp_bias:
                    t[f"layer{layer}.mlp{m}.b"] = _bias(rng, m_in, config.hidden)
                m_in = config.hidden
        f_in = config.hidden
    t["head.W"] = _glorot(rng, config.readout_dim(), num_classes)
    t["head.b"] = _bias(rng, config.readout_dim(), num_classes)
    return ModelParams(config, feature_dim, num_classes, t)


def wrap_params(params: ModelParams, requires_grad: bool = True) -> dict[str, Tensor]:
    """Put every parameter array on the tape (or off it, for inference)."""
    make = parameter if requires_grad else constant
    return {name: make(arr) for name, arr in params.tensors.items()}


# -- layers (tensor level) ---------------------------------------------------


def _gcn_norm(e: np.ndarray) -> np.ndarray:
    """The symmetric normalization matrix (e + I) / sqrt(dh_i dh_j)."""
    d_hat = 1.0 + e.sum(axis=1)
    a_hat = e + np.eye(e.shape[0])
    inv_sqrt = 1.0 / np.sqrt(d_hat)
    return a_hat * np.outer(inv_sqrt, inv_sqrt)


def gcn_layer_t(
    h: Tensor, e: np.ndarray, w: Tensor, skip_proj: Tensor | None, skip: bool
) -> Tensor:
    out = (constant(_gcn_norm(e)) @ h @ w).relu()
    if skip:
        out = out + (h @ skip_proj if skip_proj is not None else h)
    return out


def gin_layer_t(
    h: Tensor, e: np.ndarray, eps: Tensor, mlp: list[tuple[Tensor, Tensor | None]]
) -> Tensor:
    one_plus_eps = constant(np.ones(1)) + eps
    agg = h * one_plus_eps + constant(e) @ h
    out = agg
    for m, (w, b) in enumerate(mlp):
        out = out @ w
        if b is not None:
            out = out + b
        if m + 1 < len(mlp):
            out = out.relu()
    return out


def _pool(h: Tensor, readout: str) -> Tensor:
    pooled = h.mean_rows() if readout == "mean" else h.sum(axis=0)
    return pooled.reshape((1, pooled.value.shape[0]))


@dataclass(eq=False)
class TensorTrace:
    """Forward intermediates kept on the tape, for losses built downstream."""

    embeddings: list[Tensor]
    pooled: list[Tensor]
    h_graph: Tensor
    logits: Tensor
    probs: Tensor


def forward_trace(
    g: NodeFeaturedGraph,
    wrapped: dict[str, Tensor],
    params: ModelParams,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> TensorTrace:
    """Run the configured stack on one graph, keeping intermediates on-tape."""
    cfg = params.config
    if g.n == 0:
        raise ValueError("cannot classify an empty graph")
    if g.d != params.feature_dim:
        raise ValueError(f"feature dim {g.d} does not match params ({params.feature_dim})")

    h = constant(g.v)
    embeddings: list[Tensor] = []
    for layer in range(cfg.k):
        if cfg.arch == "gcn":
            h = gcn_layer_t(
                h,
                g.e,
                wrapped[f"layer{layer}.W"],
                wrapped.get(f"layer{layer}.P"),
                cfg.gcn_skip,
            )
        else:
            mlp = [
                (
                    wrapped[f"layer{layer}.mlp{m}.W"],
                    wrapped.get(f"layer{layer}.mlp{m}.b"),
                )
                for m in range(cfg.gin_mlp_depth)
            ]
            h = gin_layer_t(h, g.e, wrapped[f"layer{layer}.eps"], mlp)
        embeddings.append(h)

    pooled = [_pool(e, cfg.readout) for e in embeddings]
    h_graph = concat(pooled, axis=1) if cfg.arch == "gin" else pooled[-1]
    logits = head_logits(h_graph, wrapped)
    logits = apply_dropout(logits, cfg.dropout, training, rng)
    return TensorTrace(embeddings, pooled, h_graph, logits, logits.softmax())


def head_logits(h_graph: Tensor, wrapped: dict[str, Tensor]) -> Tensor:
    """The dense classifier layer on a (1 x readout_dim) representation."""
    return h_graph @ wrapped["head.W"] + wrapped["head.b"]


def head_logits_layer_block(
    h_pooled: Tensor, wrapped: dict[str, Tensor], layer: int, hidden: int
) -> Tensor:
    """Classifier restricted to one layer's block of head rows.

    For the GIN concatenated readout the head weight splits into K row
    blocks, one per layer; routing a single layer's pooled vector through
    its block is exactly the head's response to that layer's representation.
    """
    block = wrapped["head.W"].slice_rows(layer * hidden, (layer + 1) * hidden)
    return h_pooled @ block + wrapped["head.b"]


def apply_dropout(
    logits: Tensor, rate: float, training: bool, rng: np.random.Generator | None
) -> Tensor:
    """Inverted dropout on the head's logits; identity outside training."""
    if not training or rate == 0.0:
        return logits
    if rng is None:
        raise ValueError("dropout in training mode needs an rng")
    mask = (rng.random(logits.value.shape) >= rate) / (1.0 - rate)
    return logits * constant(mask)


def forward_classify(
    g: NodeFeaturedGraph,
    params: ModelParams,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> ForwardTrace:
    """Classify one graph; returns the full trace as plain arrays."""
    wrapped = wrap_params(params, requires_grad=False)
    t = forward_trace(g, wrapped, params, training, rng)
    return ForwardTrace(
        layer_embeddings=[e.value for e in t.embeddings],
        pooled=[p.value.ravel() for p in t.pooled],
        h_graph=t.h_graph.value.ravel(),
        logits=t.logits.value.ravel(),
        probs=t.probs.value.ravel(),
    )


# -- loss ---------------------------------------------------------------------


def soft_cross_entropy(y_target: LabelDistribution, p: np.ndarray) -> float:
    """-sum_c y(c) log p(c), with p clamped at 1e-12. Linear in y."""
    p = np.asarray(p, dtype=np.float64).ravel()
    if p.shape != y_target.p.shape:
        raise ValueError(f"dimension mismatch: target {y_target.p.shape}, p {p.shape}")
    return float(-(y_target.p * np.log(np.maximum(p, LOG_CLAMP))).sum())


def cross_entropy_t(y_target: LabelDistribution, logits: Tensor) -> Tensor:
    """Tape version of soft_cross_entropy on a (1 x C) logits tensor.

    Built from log-softmax rather than log(softmax): the same value wherever
    probabilities stay above the clamp, but with the exact gradient p - y,
    which a saturated softmax feeding a clamped log would zero out.
    """
    y = constant(y_target.p.reshape(1, -1))
    return (y * logits.log_softmax()).sum().scale(-1.0)


def model_gradients(
    batch: list[tuple[NodeFeaturedGraph, LabelDistribution]],
    params: ModelParams,
    rng: np.random.Generator | None = None,
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean soft-CE loss over the batch and its exact gradient per parameter.

    Graphs are processed one at a time in batch order with gradient
    accumulation, so results are bit-reproducible for a fixed rng state.
    Parameters that never touch the loss (dead ReLU paths) get zero arrays.
    """
    if not batch:
        raise ValueError("model_gradients needs a nonempty batch")
    wrapped = wrap_params(params, requires_grad=True)
    total: Tensor | None = None
    for g, y in batch:
        t = forward_trace(g, wrapped, params, training=True, rng=rng)
        ce = cross_entropy_t(y, t.logits)
        total = ce if total is None else total + ce
    loss = total.scale(1.0 / len(batch))
    loss.backward()
    grads = {
        name: (w.grad if w.grad is not None else np.zeros_like(w.value))
        for name, w in wrapped.items()
    }
    return float(loss.value), grads


# -- checkpoints ----------------------------------------------------------------


def save_checkpoint(params: ModelParams, path: str) -> None:
    """Self-describing JSON checkpoint: config, shapes, row-major values."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config": asdict(params.config),
        "feature_dim": params.feature_dim,
        "num_classes": params.num_classes,
        "tensors": {
            name: {"shape": list(arr.shape), "data": arr.ravel().tolist()}
            for name, arr in params.tensors.items()
        },
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
    os.replace(tmp, path)


def load_checkpoint(path: str) -> ModelParams:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"not an ifmixup checkpoint: {path}")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('version')}")
    config = ModelConfig(**doc["config"])
    tensors = {
        name: np.asarray(rec["data"], dtype=np.float64).reshape(rec["shape"])
        for name, rec in doc["tensors"].items()
    }
    return ModelParams(config, int(doc["feature_dim"]), int(doc["num_classes"]), tensors)
