"""Exact Markov-chain analysis of pickleball doubles scoring systems."""

__version__ = "0.1.0"
