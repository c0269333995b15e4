"""Constrained Stackelberg multi-agent RL.

Subpackages: matgame (one-shot game solver), tabular (finite-game operator
and convergence suite), nn (networks and gradients), agents (CSQ and
CS-MADDPG), driving (2-D benchmark scenarios), harness (CLI, training and
verification drivers).
"""

__version__ = "0.1.0"
