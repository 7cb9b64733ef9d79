"""
Moment Measure Solver - damped Newton solver for semidiscrete moment measures in the plane
"""

__version__ = "0.1.0"
