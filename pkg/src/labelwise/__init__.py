"""Multi-label document classification at desk scale.

Pipeline: text preprocessing (Porter2 stemming, stopword and digit
handling), CBOW word embeddings, a transformer encoder with per-label
attention and per-label sigmoid heads, binary cross-entropy or
distribution-aware margin training, ranking metrics, and synthetic
long-tailed corpora for end-to-end verification.
"""

__version__ = "0.1.0"
