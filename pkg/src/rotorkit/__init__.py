"""Simulation and pulse-design toolkit for strongly kicked rotors.

Dimensionless units throughout: time tau = t*hbar/I, kick strength
P = integral of the dimensionless field. Angles are in radians.
"""

__version__ = "0.1.0"
