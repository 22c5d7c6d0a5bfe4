"""Twisted Reidemeister torsion of fundamental shadow link complements and of doubles of polyhedra."""

__version__ = "1.0.0"
