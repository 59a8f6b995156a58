"""Image loading for training and inference.

Images come in as 8-bit PGM, leave as float32 tensors in [0, 1] with ink
polarity (strokes bright, background dark) after an exact area-averaged
resize to the model's input size.
"""

import numpy as np

from .autodiff import Tensor
from .pgm import read_pgm


def _overlap_weights(src: int, dst: int) -> np.ndarray:
    """Row-interval overlap matrix for exact area-average resampling."""
    m = np.zeros((dst, src))
    scale = src / dst
    for i in range(dst):
        lo, hi = i * scale, (i + 1) * scale
        j0, j1 = int(np.floor(lo)), min(src, int(np.ceil(hi)))
        for j in range(j0, j1):
            m[i, j] = min(hi, j + 1) - max(lo, j)
    return m / scale


def area_resize(image: np.ndarray, target: int) -> np.ndarray:
    """Area-averaged resize of a 2-D float image to target x target."""
    h, w = image.shape
    if h == target and w == target:
        return image.astype(np.float64, copy=True)
    out = _overlap_weights(h, target) @ image.astype(np.float64) @ _overlap_weights(w, target).T
    return out


def load_image(manifest, record, target_size: int) -> np.ndarray:
    """One sample as float32 [target, target], ink-high polarity."""
    raw = read_pgm(manifest.image_path(record))
    scaled = raw.astype(np.float64) / 255.0
    resized = area_resize(scaled, target_size)
    return (1.0 - resized).astype(np.float32)


def load_batch(manifest, sample_ids, target_size: int):
    """Stack samples into a Tensor[N,1,S,S] plus integer class labels."""
    lookup = manifest.by_id()
    images = []
    labels = []
    for sid in sample_ids:
        if sid not in lookup:
            raise KeyError(f"sample_id {sid!r} not in manifest")
        rec = lookup[sid]
        images.append(load_image(manifest, rec, target_size))
        labels.append(manifest.class_index(rec.class_name))
    batch = np.stack(images)[:, None, :, :]
    return Tensor(batch), np.asarray(labels, dtype=np.int64)


class ImageCache:
    """Preloaded split images, keyed by sample_id, for the training loops."""

    def __init__(self, manifest, records, target_size: int):
        self.index = {}
        arrays = []
        for i, rec in enumerate(sorted(records, key=lambda r: r.sample_id)):
            self.index[rec.sample_id] = i
            arrays.append(load_image(manifest, rec, target_size))
        self.data = np.stack(arrays)[:, None, :, :] if arrays else np.zeros((0, 1, target_size, target_size), np.float32)
        lookup = manifest.by_id()
        self.labels = np.asarray(
            [manifest.class_index(lookup[sid].class_name) for sid in self.ids()], dtype=np.int64
        )

    def ids(self):
        return sorted(self.index, key=lambda sid: self.index[sid])

    def batch(self, sample_ids) -> np.ndarray:
        rows = [self.index[sid] for sid in sample_ids]
        return self.data[rows]

    def __len__(self):
        return len(self.index)
