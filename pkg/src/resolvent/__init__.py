"""Cross-checks between Igusa zeta coefficients, orbit-density oracles and
Nichols algebra cohomology for the cubic and quartic prehomogeneous spaces."""

__version__ = "0.1.0"
