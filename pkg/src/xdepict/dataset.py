"""Synthetic corpus generation, manifest handling, splits, class weights.

The corpus is a pure function of the generator arguments: instance
geometry, style rendering, and split assignment all derive their RNG
streams from the master seed, so regeneration is byte-identical.
"""

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .motifs import MOTIF_NAMES, InstanceSpec
from .pgm import write_pgm
from .raster import render_motif
from .styles import STYLES

GENERATOR_VERSION = 1
DEFAULT_RATIOS = (0.72, 0.13, 0.15)
SPLIT_NAMES = ("train", "val", "test")


@dataclass
class SampleRecord:
    sample_id: str
    class_name: str
    instance_id: int
    style: str
    path: str  # relative to the manifest directory
    width: int
    height: int
    split: str = ""


@dataclass
class DatasetManifest:
    seed: int
    num_classes: int
    image_size: int
    classes: list
    records: list = field(default_factory=list)
    root: Path = None  # directory holding manifest + images; not serialized

    def by_id(self) -> dict:
        return {r.sample_id: r for r in self.records}

    def split_records(self, split: str) -> list:
        if split not in SPLIT_NAMES:
            raise ValueError(f"unknown split {split!r}")
        return [r for r in self.records if r.split == split]

    def class_index(self, name: str) -> int:
        return self.classes.index(name)

    def image_path(self, record: SampleRecord) -> Path:
        return Path(self.root) / record.path


def split_instances(instance_keys, ratios, seed: int) -> dict:
    """Assign instances to train/val/test with largest-remainder rounding.

    ``instance_keys`` is a list of (class_name, instance_id); stratification
    runs per class so every class lands in every non-empty split.
    """
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r < 0 for r in ratios) or not math.isclose(sum(ratios), 1.0, abs_tol=1e-9):
        raise ValueError(f"split ratios must be 3 non-negative values summing to 1, got {ratios}")
    by_class = {}
    for cls, iid in instance_keys:
        by_class.setdefault(cls, []).append(iid)
    assignment = {}
    for ci, cls in enumerate(sorted(by_class)):
        ids = sorted(by_class[cls])
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(77, ci)))
        rng.shuffle(ids)
        n = len(ids)
        quotas = [r * n for r in ratios]
        counts = [int(math.floor(q)) for q in quotas]
        leftover = n - sum(counts)
        order = sorted(range(3), key=lambda i: (-(quotas[i] - counts[i]), i))
        for i in range(leftover):
            counts[order[i % 3]] += 1
        for si, r in enumerate(ratios):
            if r > 0 and counts[si] == 0:
                raise ValueError(
                    f"class {cls!r}: {n} instances cannot fill a non-empty "
                    f"{SPLIT_NAMES[si]} split at ratios {ratios}"
                )
        pos = 0
        for si, cnt in enumerate(counts):
            for iid in ids[pos : pos + cnt]:
                assignment[(cls, iid)] = SPLIT_NAMES[si]
            pos += cnt
    return assignment


def generate_dataset(
    num_classes: int,
    instances_per_class: int,
    styles,
    image_size: int,
    seed: int,
    out_dir,
    ratios=DEFAULT_RATIOS,
    jitter_scale: float = 0.03,
) -> DatasetManifest:
    """Render the corpus and write images plus a manifest under ``out_dir``."""
    if not 1 <= num_classes <= len(MOTIF_NAMES):
        raise ValueError(f"num_classes must be in [1, {len(MOTIF_NAMES)}], got {num_classes}")
    if instances_per_class < 1:
        raise ValueError("instances_per_class must be >= 1")
    style_list = [STYLES[s] if isinstance(s, str) else s for s in styles]
    out_dir = Path(out_dir)
    classes = list(MOTIF_NAMES[:num_classes])
    manifest = DatasetManifest(
        seed=seed, num_classes=num_classes, image_size=image_size, classes=classes, root=out_dir
    )

    instance_keys = []
    global_iid = 0
    specs = {}
    for ci, cls in enumerate(classes):
        for k in range(instances_per_class):
            ss = np.random.SeedSequence(entropy=seed, spawn_key=(ci, k))
            jitter_seed = int(ss.generate_state(1, dtype=np.uint64)[0])
            specs[(cls, global_iid)] = InstanceSpec(cls, global_iid, jitter_seed, jitter_scale)
            instance_keys.append((cls, global_iid))
            global_iid += 1

    assignment = split_instances(instance_keys, ratios, seed)

    for cls, iid in instance_keys:
        spec = specs[(cls, iid)]
        cls_dir = out_dir / "images" / cls
        os.makedirs(cls_dir, exist_ok=True)
        for style in style_list:
            sample_id = f"{cls}_i{iid:04d}_{style.name}"
            rel = f"images/{cls}/{sample_id}.pgm"
            img = render_motif(spec, style, image_size)
            write_pgm(out_dir / rel, img)
            manifest.records.append(
                SampleRecord(
                    sample_id=sample_id,
                    class_name=cls,
                    instance_id=iid,
                    style=style.name,
                    path=rel,
                    width=image_size,
                    height=image_size,
                    split=assignment[(cls, iid)],
                )
            )
    save_manifest(manifest, out_dir / "manifest.jsonl")
    return manifest


def save_manifest(manifest: DatasetManifest, path) -> None:
    header = {
        "seed": manifest.seed,
        "num_classes": manifest.num_classes,
        "generator_version": GENERATOR_VERSION,
        "image_size": manifest.image_size,
        "classes": manifest.classes,
    }
    lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    for r in manifest.records:
        lines.append(
            json.dumps(
                {
                    "sample_id": r.sample_id,
                    "class": r.class_name,
                    "instance_id": r.instance_id,
                    "style": r.style,
                    "path": r.path,
                    "width": r.width,
                    "height": r.height,
                    "split": r.split,
                },
                sort_keys=True,
                separators=(",", ":"),
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty manifest")
    header = json.loads(lines[0])
    manifest = DatasetManifest(
        seed=header["seed"],
        num_classes=header["num_classes"],
        image_size=header["image_size"],
        classes=list(header["classes"]),
        root=path.parent,
    )
    for ln in lines[1:]:
        d = json.loads(ln)
        manifest.records.append(
            SampleRecord(
                sample_id=d["sample_id"],
                class_name=d["class"],
                instance_id=d["instance_id"],
                style=d["style"],
                path=d["path"],
                width=d["width"],
                height=d["height"],
                split=d["split"],
            )
        )
    seen = set()
    for r in manifest.records:
        if r.sample_id in seen:
            raise ValueError(f"{path}: duplicate sample_id {r.sample_id!r}")
        seen.add(r.sample_id)
    return manifest


def class_weights(manifest: DatasetManifest, split: str) -> np.ndarray:
    """Inverse-frequency weights w_c = N / (K * n_c) over one split."""
    records = manifest.split_records(split)
    if not records:
        raise ValueError(f"split {split!r} is empty")
    k = len(manifest.classes)
    counts = np.zeros(k, dtype=np.int64)
    for r in records:
        counts[manifest.class_index(r.class_name)] += 1
    if np.any(counts == 0):
        missing = [manifest.classes[i] for i in np.flatnonzero(counts == 0)]
        raise ValueError(f"split {split!r} has no samples for classes {missing}")
    n = counts.sum()
    return (n / (k * counts)).astype(np.float32)
