"""Cross-depiction motif similarity engine.

Classification and metric-learning retrieval of procedurally generated
motif images rendered in several depiction styles, built on a small
numpy/numba tensor library with reverse-mode autodiff.
"""

__version__ = "0.1.0"

from .autodiff import Tensor, backward, no_grad
from .resnet import ArchConfig, build_model

__all__ = ["Tensor", "backward", "no_grad", "ArchConfig", "build_model", "__version__"]
