"""Corpus preprocessing, rule-based knowledge injection and evaluation tools
for feature-aware neural machine translation."""

__version__ = "0.1.0"
