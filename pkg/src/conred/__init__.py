"""Exact constraint reduction toolkit."""
