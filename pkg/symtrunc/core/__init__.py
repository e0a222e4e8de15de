"""
Core functionality for the symtrunc package.

This module contains step functions and their rearrangements, model domains,
the Hardy operator, symmetrization, majorization certificates and the
verification harnesses.
"""
