"""Excel export of report tables."""
