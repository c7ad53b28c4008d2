"""
Simulation package: Monte Carlo sweeps, weight training and reference curves.
"""
