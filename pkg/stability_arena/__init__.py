"""Monte Carlo instability tests for parameterized Markov chain families."""

__version__ = "0.1.0"
