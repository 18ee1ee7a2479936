"""Test suite for wavespec."""
