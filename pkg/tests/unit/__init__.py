"""Unit tests for mimolab."""
