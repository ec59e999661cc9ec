"""Test suite for hgsa."""
