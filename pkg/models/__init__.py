"""Pydantic domain types for LDPC finite-length analysis."""
