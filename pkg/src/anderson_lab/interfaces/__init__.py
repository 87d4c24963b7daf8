"""User interfaces for Anderson Lab."""
