"""Numerical special Lagrangian geometry on C^m and flat-torus Calabi-Yau
model problems.

Modules:

  core        flat Calabi-Yau package, calibration and SL plane tests,
              moment maps of subgroups of SU(m) x C^m
  graphs      the special Lagrangian graph equation Im det(I + i Hess f)
  gridio      masked 2D grid fields and their CSV format
  u1          the U(1)-invariant Dirichlet potential solver and its lift
              to SL 3-folds of C^3
  fibrations  SL fibrations: Dirichlet families, the explicit piecewise-
              smooth map, the T^2-cone fibration
  families    closed-form model families, asymptotic-cone decay, the
              Legendrian index, complete-intersection moduli dimensions
  calabi      the Monge-Ampere continuity method on flat tori (m = 1, 2)
  evolution   surface evolution sweeping SL 3-folds, SO(3) cross-check
  cli         deterministic JSON-report command line
"""

__version__ = "0.1.0"

from . import (calabi, cli, core, evolution, families, fibrations, graphs,
               gridio, u1)

__all__ = ["calabi", "cli", "core", "evolution", "families", "fibrations",
           "graphs", "gridio", "u1", "__version__"]
