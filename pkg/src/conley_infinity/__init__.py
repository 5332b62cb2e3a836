"""Conley index methods for polynomial vector fields at infinity.

Poincare compactification of planar (and n-dimensional) polynomial fields,
classification of equilibria on the sphere at infinity, index triples of
isolated invariant sets touching the boundary, the index at infinity of
sets with isolated invariant dynamical complement, and the detection of
connections to such sets through ersatz infinities.
"""

__version__ = "0.1.0"
