"""Microcanonical thermodynamics in concrete finite probabilistic theories."""
