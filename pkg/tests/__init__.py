"""Test package for durable AI agent."""
