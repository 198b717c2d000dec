"""Deterministic low-dispersion sampling and PRM-family planners."""
