"""Parameter planning and analytic simulation of quantum phase estimation."""

__version__ = "0.1.0"
