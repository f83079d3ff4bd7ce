"""
Test suite for delaycal.

Coverage:
- trajectory, plant and filter primitives
- identifiability witnesses and reachable sets
- consistency statistics and chi-square quantiles
- Monte Carlo runner, CLI and batch artifacts
- acceptance reproductions (marked slow)
"""
