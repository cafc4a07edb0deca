"""Utility functions for output files and run manifests."""
