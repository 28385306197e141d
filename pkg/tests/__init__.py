"""mimolab test suite."""
