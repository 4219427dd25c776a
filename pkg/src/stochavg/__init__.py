"""Distributed averaging over random digraph flows with noisy links.

The package simulates a network of agents repeatedly averaging with their
current in-neighbours through links corrupted by additive and multiplicative
measurement noise, certifies which hypotheses a given flow/noise/gain
configuration satisfies, and evaluates steady-state error bounds to compare
against Monte Carlo estimates.
"""

__version__ = "0.1.0"

from .errors import StochAvgError

__all__ = ["StochAvgError", "__version__"]
