"""Joints, vanishing polynomials, polynomial partitioning and incidence counts."""

__version__ = "0.1.0"
