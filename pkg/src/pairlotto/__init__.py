"""Lottery ticket-space combinatorics, distributed Quick Pick strategies and
expected-value analytics."""

__version__ = "0.1.0"
