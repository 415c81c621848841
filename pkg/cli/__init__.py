"""Command-line interface: ``ldpc-fl``."""
