"""Utility modules: errors, logging, configuration and formatting."""
