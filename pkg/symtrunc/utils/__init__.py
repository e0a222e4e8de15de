"""
Utility functions for the symtrunc package.

This module contains utility functions for statistics, progress tracking
and performance profiling.
"""
