"""
delaycal - joint state and time-delay estimation lab.

Runs Monte Carlo consistency experiments for an augmented-state hybrid EKF
that estimates position and sensor delay together, alongside a known-delay
baseline, and demonstrates delay unidentifiability with explicit pairs of
indistinguishable systems.

Usage:
    python main.py montecarlo --config configs/traj2_fixed.json --out out/traj2_fixed
    python main.py simulate --traj traj1 --seed 3
    python main.py identifiability --tau -1 --tau-prime -2
    python main.py report out/traj2_fixed

Technical Stack:
- Python 3.10+
- numpy / scipy for the numerics
- Pydantic for configuration and validation
- Jinja2 for SVG plots
"""

import sys

from delaycal.cli import main

if __name__ == "__main__":
    sys.exit(main())
