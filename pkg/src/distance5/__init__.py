"""Combinatorial verification of hyperbolic knots with two toroidal surgeries at distance 5."""
__version__ = "0.1.0"
