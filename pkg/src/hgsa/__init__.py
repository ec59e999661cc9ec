"""hgsa - simulator and verifier for two-step hyperentangled GHZ-state analysis."""

__version__ = "0.1.0"
