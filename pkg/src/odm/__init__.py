"""Text-conditioned destylization pre-training for scene text detectors.

Subpackages and modules:

* ``odm.geom``: quads, Bezier outlines, polygon IoU
* ``odm.annot``: annotation parsing and the canonical JSONL format
* ``odm.glyph``: fonts and binary label rendering
* ``odm.nd``: the small reverse-mode autodiff engine everything trains on
* ``odm.model``: image/text encoders, cross-attention fusion, decoder
* ``odm.control``: prompt drop and noise augmentation
* ``odm.loss``, ``odm.train``: objectives, optimizer, checkpoints
* ``odm.evaluation``: detection matching and P/R/Hmean
"""
from .annot import SceneAnnotation, TextInstance, read_canonical, write_canonical
from .control import ControllerConfig, TextController
from .model import OdmConfig, OdmModel, tokenize
from .train import Trainer, TrainConfig

__version__ = "0.1.0"

__all__ = [
    "ControllerConfig", "OdmConfig", "OdmModel", "SceneAnnotation", "TextController", "TextInstance",
    "TrainConfig", "Trainer", "read_canonical", "tokenize", "write_canonical",
]
