"""GKZ hypergeometric systems: exact operators, rank prediction and twisted periods."""

__version__ = "1.0.0"
