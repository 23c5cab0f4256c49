"""Witt classes, isotropic reductions and stratified decompositions over Q."""

__version__ = "0.1.0"
