"""Tests for symplecta."""
