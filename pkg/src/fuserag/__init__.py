"""Ensemble retrieval: dense vectors and a knowledge graph joined by scored fusion."""

__version__ = "0.1.0"
