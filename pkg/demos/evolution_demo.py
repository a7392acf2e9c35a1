"""Evolve a phase-rotated round sphere so that it sweeps out a special
Lagrangian 3-fold, and compare against the closed-form SO(3)-invariant
family r^3 sin(3 theta) = const.
"""

import numpy as np

from slgeo import evolution


def main():
    surf = evolution.EvolvingSurface.sphere(
        3, scale=np.exp(1j * np.pi / 6), dt=0.01)
    evolution.evolve_run(surf, 0.5)
    print("%d nodes evolved to t = %.2f in %d steps"
          % (len(surf.verts), surf.times[-1], len(surf.states) - 1))
    print("symplectic drift:       %.2e" % evolution.symplectic_drift(surf))
    print("swept-surface SL defect: %.2e" % evolution.swept_sl_defect(surf))
    print("deviation from family:  %.2e" % evolution.compare_so3(surf))


if __name__ == "__main__":
    main()
