"""Adversarial robustness harness for claim verification pipelines."""

__version__ = "0.1.0"
