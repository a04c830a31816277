"""Exact homological algebra over Z/p^n[G] for G cyclic of order p^n.

The package verifies, by exact computation on small rings, the algebraic
layer behind derived p-adic height pairings: Howell-form linear algebra,
group-ring filtrations, the spectral sequence of the augmentation-ideal
filtration on a two-term complex, the two derived height pairings and
their coincidence, Stark-system ideals versus Fitting ideals, and
structure recovery of cokernels over a discrete valuation ring.
"""

__version__ = "0.1.0"
