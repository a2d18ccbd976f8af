"""Shared utilities: errors, progress logging, settings."""
