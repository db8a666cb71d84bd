"""Exact verification of symmetrized weight-function identities, residue
biorthogonality relations, determinant formulas, and their quantum-loop and
elliptic analogues, by seeded random evaluation over exact fields."""

__version__ = "0.1.0"
