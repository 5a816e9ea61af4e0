"""Test suite for tropembed."""
