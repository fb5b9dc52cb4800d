"""Shared registry of acceptance results (printed by ``conftest.py``)."""
LINES = {}
