"""Test suite for Sharp Extension."""
