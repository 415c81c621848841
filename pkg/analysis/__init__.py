"""Analytic finite-length tools: density evolution, scaling, stopping sets, variance."""
