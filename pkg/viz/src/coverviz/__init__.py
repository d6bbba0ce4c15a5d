"""Headless figure generation for inspection-simulation logs.

Consumes the simulator's line-delimited round log and mesh files through
their documented formats only; no simulator code is imported.
"""

__version__ = "0.1.0"
