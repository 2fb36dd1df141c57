"""superloc : localisation CS sur modèles linéaires et volumes d'espaces homogènes."""

__all__ = ["__version__"]

__version__ = "0.1.0"
