"""Simulation and verification toolkit for half-space polymer models.

Submodules
----------
rng            Seeded, splittable random streams.
special        Digamma and trigamma used by the log-weight moment formulas.
distributions  Samplers and CDFs for the weight laws.
stats          KS tests, moment comparisons, suite evaluation with retries.
lattice        Octant partition functions, stationary boundary grids.
stationary     Discrete and continuum stationary boundary processes.
lpp            Zero-temperature (last passage) counterparts.
she            Reflected-walk partition functions and the Robin heat kernel.
scaling        Intermediate-disorder scaling and the matching identity.
experiments    Named, seeded experiment catalog behind the CLI.
"""

__version__ = "0.1.0"
