"""Tests for the gkz-periods package."""
