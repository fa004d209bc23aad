"""Reference neural servers for the actforge generator and filter wire protocols."""

__version__ = "0.1.0"

from .classifier import FilterHyperparams, TurnClassifier, train_filter
from .condition import build_source, linearize_act
from .generator import GenHyperparams, TinyGenerator, train_generator
from .synth import build_synthetic_corpus
from .vocab import WordVocab
