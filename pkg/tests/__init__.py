"""Test keyrate package."""
