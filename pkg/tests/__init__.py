"""Test suite of the iontoffoli simulator."""
