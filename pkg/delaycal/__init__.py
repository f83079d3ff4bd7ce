"""
delaycal - joint state/time-delay estimation laboratory.

Simulates a single-state system whose position measurements arrive with an
unknown relative delay, runs the augmented-state hybrid EKF that estimates
position and delay together, and measures how (in)consistent it is against
a known-delay baseline over Monte Carlo batches.
"""

__version__ = "1.0.0"
