"""Scaled-down residual classifier and its embedding-head variant.

The backbone is a stem conv followed by stages of two-conv residual blocks
(identity skips; 1x1 projection shortcut where a stage downsamples), global
average pooling, and a linear head that is either a classifier over motif
classes or an embedder producing fixed-dimension vectors.
"""

from dataclasses import dataclass, replace

import numpy as np

from .autodiff import Tensor
from .ops import BatchNormState, batch_norm2d, conv2d, global_avg_pool, linear, relu

CLASSIFIER = "classifier"
EMBEDDER = "embedder"


@dataclass
class ArchConfig:
    in_channels: int = 1
    stage_channels: tuple = (16, 32, 64)
    blocks_per_stage: int = 2
    num_classes: int = 9
    embedding_dim: int = 128
    input_size: int = 64
    normalize_embeddings: bool = False

    def __post_init__(self):
        self.stage_channels = tuple(int(c) for c in self.stage_channels)
        if not self.stage_channels:
            raise ValueError("stage_channels must be non-empty")
        if any(c <= p for p, c in zip(self.stage_channels, self.stage_channels[1:])):
            raise ValueError(f"stage_channels must strictly increase: {self.stage_channels}")
        if self.embedding_dim < 2:
            raise ValueError("embedding_dim must be >= 2")
        if self.in_channels < 1 or self.num_classes < 1 or self.input_size < 8:
            raise ValueError("invalid architecture dimensions")
        if self.blocks_per_stage < 1:
            raise ValueError("blocks_per_stage must be >= 1")

    def to_dict(self) -> dict:
        return {
            "in_channels": self.in_channels,
            "stage_channels": list(self.stage_channels),
            "blocks_per_stage": self.blocks_per_stage,
            "num_classes": self.num_classes,
            "embedding_dim": self.embedding_dim,
            "input_size": self.input_size,
            "normalize_embeddings": self.normalize_embeddings,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArchConfig":
        return cls(
            in_channels=d["in_channels"],
            stage_channels=tuple(d["stage_channels"]),
            blocks_per_stage=d["blocks_per_stage"],
            num_classes=d["num_classes"],
            embedding_dim=d["embedding_dim"],
            input_size=d["input_size"],
            normalize_embeddings=d.get("normalize_embeddings", False),
        )


class Model:
    """Parameter container plus forward passes for one head kind."""

    def __init__(self, arch: ArchConfig, head_kind: str, seed: int = 0):
        if head_kind not in (CLASSIFIER, EMBEDDER):
            raise ValueError(f"unknown head kind {head_kind!r}")
        self.arch = arch
        self.head_kind = head_kind
        self.seed = seed
        self.params: dict[str, Tensor] = {}
        self.param_order: list[str] = []
        self.bn_states: dict[str, BatchNormState] = {}
        self.train_mode = True
        self.training_meta = {"epochs": 0, "final_loss": None, "seed": seed}
        self._build(np.random.default_rng(seed))

    # -- construction --------------------------------------------------

    def _add_param(self, name: str, value: np.ndarray):
        self.params[name] = Tensor(value.astype(np.float32), requires_grad=True)
        self.param_order.append(name)

    def _add_conv(self, name: str, c_out: int, c_in: int, k: int, rng):
        fan_in = c_in * k * k
        std = np.sqrt(2.0 / fan_in)
        self._add_param(f"{name}.weight", rng.normal(0.0, std, (c_out, c_in, k, k)))
        self._add_param(f"{name}.bias", np.zeros(c_out))

    def _add_bn(self, name: str, channels: int):
        self._add_param(f"{name}.gamma", np.ones(channels))
        self._add_param(f"{name}.beta", np.zeros(channels))
        self.bn_states[name] = BatchNormState(channels)

    def _add_linear(self, name: str, f_out: int, f_in: int, rng):
        std = np.sqrt(2.0 / f_in)
        self._add_param(f"{name}.weight", rng.normal(0.0, std, (f_out, f_in)))
        self._add_param(f"{name}.bias", np.zeros(f_out))

    def _build(self, rng):
        arch = self.arch
        self._add_conv("stem", arch.stage_channels[0], arch.in_channels, 3, rng)
        c_prev = arch.stage_channels[0]
        for si, c_out in enumerate(arch.stage_channels):
            for bi in range(arch.blocks_per_stage):
                prefix = f"stage{si}.block{bi}"
                stride = 2 if (si > 0 and bi == 0) else 1
                self._add_conv(f"{prefix}.conv1", c_out, c_prev, 3, rng)
                self._add_bn(f"{prefix}.bn1", c_out)
                self._add_conv(f"{prefix}.conv2", c_out, c_out, 3, rng)
                self._add_bn(f"{prefix}.bn2", c_out)
                if stride != 1 or c_prev != c_out:
                    self._add_conv(f"{prefix}.proj", c_out, c_prev, 1, rng)
                    self._add_bn(f"{prefix}.proj_bn", c_out)
                c_prev = c_out
        head_width = arch.num_classes if self.head_kind == CLASSIFIER else arch.embedding_dim
        self._add_linear("head", head_width, arch.stage_channels[-1], rng)

    # -- mode and parameter access -------------------------------------

    def train(self):
        self.train_mode = True
        return self

    def eval(self):
        self.train_mode = False
        return self

    def parameters(self) -> list[Tensor]:
        return [self.params[n] for n in self.param_order]

    def head_param_names(self) -> list[str]:
        return [n for n in self.param_order if n.startswith("head.")]

    def backbone_param_names(self) -> list[str]:
        return [n for n in self.param_order if not n.startswith("head.")]

    def num_parameters(self) -> int:
        return sum(p.data.size for p in self.parameters())

    # -- forward passes -------------------------------------------------

    def _bn(self, x, name):
        return batch_norm2d(
            x, self.params[f"{name}.gamma"], self.params[f"{name}.beta"],
            self.bn_states[name], training=self.train_mode,
        )

    def _block(self, x, prefix, stride):
        p = self.params
        out = conv2d(x, p[f"{prefix}.conv1.weight"], p[f"{prefix}.conv1.bias"], stride=stride, pad=1)
        out = relu(self._bn(out, f"{prefix}.bn1"))
        out = conv2d(out, p[f"{prefix}.conv2.weight"], p[f"{prefix}.conv2.bias"], stride=1, pad=1)
        out = self._bn(out, f"{prefix}.bn2")
        if f"{prefix}.proj.weight" in p:
            shortcut = conv2d(x, p[f"{prefix}.proj.weight"], p[f"{prefix}.proj.bias"], stride=stride, pad=0)
            shortcut = self._bn(shortcut, f"{prefix}.proj_bn")
        else:
            shortcut = x
        return relu(out + shortcut)

    def features(self, batch: Tensor) -> Tensor:
        n, c, h, w = batch.data.shape
        size = self.arch.input_size
        if c != self.arch.in_channels or h != size or w != size:
            raise ValueError(
                f"expected batch [N,{self.arch.in_channels},{size},{size}], got {batch.data.shape}"
            )
        x = conv2d(batch, self.params["stem.weight"], self.params["stem.bias"], stride=1, pad=1)
        for si in range(len(self.arch.stage_channels)):
            for bi in range(self.arch.blocks_per_stage):
                stride = 2 if (si > 0 and bi == 0) else 1
                x = self._block(x, f"stage{si}.block{bi}", stride)
        return global_avg_pool(x)

    def logits(self, batch: Tensor) -> Tensor:
        if self.head_kind != CLASSIFIER:
            raise ValueError("model has no classifier head")
        feats = self.features(batch)
        return linear(feats, self.params["head.weight"], self.params["head.bias"])

    def embeddings(self, batch: Tensor) -> Tensor:
        if self.head_kind != EMBEDDER:
            raise ValueError("model has no embedding head")
        feats = self.features(batch)
        emb = linear(feats, self.params["head.weight"], self.params["head.bias"])
        if self.arch.normalize_embeddings:
            sq = (emb * emb).sum(axis=1, keepdims=True)
            emb = emb * _rsqrt(sq + 1e-12)
        return emb


def _rsqrt(x: Tensor) -> Tensor:
    from .autodiff import make_node, accumulate_grad

    out = 1.0 / np.sqrt(x.data)

    def bwd(g):
        accumulate_grad(x, g * (-0.5) * out ** 3)

    return make_node(out, (x,), bwd)


def build_model(config: ArchConfig, head: str, seed: int) -> Model:
    """Construct a He-initialized model with the requested head."""
    return Model(config, head, seed)


def forward_logits(model: Model, batch: Tensor) -> Tensor:
    return model.logits(batch)


def forward_embedding(model: Model, batch: Tensor) -> Tensor:
    return model.embeddings(batch)


def swap_head_to_embedding(checkpoint, embedding_dim: int, seed: int) -> Model:
    """Replace a trained classifier's head with a fresh embedding layer.

    All backbone parameters and batch-norm running statistics are copied
    verbatim from the checkpoint; only the head is reinitialized.
    """
    from .checkpoint import model_from_checkpoint

    if checkpoint.head_kind != CLASSIFIER:
        raise ValueError("head swap requires a classifier checkpoint")
    source = model_from_checkpoint(checkpoint)
    arch = replace(source.arch, embedding_dim=embedding_dim)
    model = Model(arch, EMBEDDER, seed)
    for name in model.backbone_param_names():
        src = source.params[name].data
        if src.shape != model.params[name].data.shape:
            raise ValueError(
                f"checkpoint parameter {name} has shape {src.shape}, "
                f"expected {model.params[name].data.shape}"
            )
        model.params[name].data = src.copy()
    for name, state in source.bn_states.items():
        dst = model.bn_states[name]
        dst.running_mean = state.running_mean.copy()
        dst.running_var = state.running_var.copy()
        dst.batches_seen = state.batches_seen
    model.training_meta = {"epochs": 0, "final_loss": None, "seed": seed}
    return model
