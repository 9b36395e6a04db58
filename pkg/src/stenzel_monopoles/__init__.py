"""Invariant monopoles on the Stenzel manifold T*S³ and on the conifold."""

__version__ = "0.1.0"
