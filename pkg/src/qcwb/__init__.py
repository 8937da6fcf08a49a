"""Desk-scale quantum chemistry workbench."""
__version__ = "0.1.0"
