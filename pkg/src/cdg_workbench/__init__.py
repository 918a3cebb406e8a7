"""Exact verification workbench for curved dg deformations A_n = A[t]/(t^{n+1})."""

__version__ = "0.1.0"
