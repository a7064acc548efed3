"""Finite truncated simplicial spaces, Segal spaces and categories."""
