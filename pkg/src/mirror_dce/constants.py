"""Physical constants (SI units, 2019 redefinition / CODATA)."""

import math

C_LIGHT = 2.99792458e8          # speed of light [m/s], exact
PLANCK_H = 6.62607015e-34       # Planck constant [J s], exact
E_CHARGE = 1.602176634e-19      # elementary charge [C], exact
K_B = 1.380649e-23              # Boltzmann constant [J/K], exact

HBAR = PLANCK_H / (2.0 * math.pi)          # reduced Planck constant [J s]
PHI0 = PLANCK_H / (2.0 * E_CHARGE)         # magnetic flux quantum h/2e [Wb]
