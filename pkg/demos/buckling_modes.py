"""Which buckling mode is softest, and when does the display collapse?

A compressed beam on a haptic pixel foundation buckles into the mode with
the lowest critical load.  With a stiff foundation that is the long mode 1
wave the renderer wants; soften the beam (or stiffen the foundation) and a
shorter wave takes over, the beam dives between the pixels, and the display
stops tracking shape.  The collapse index puts that switch at a single
dimensionless number.
"""
import math

import numpy as np

from crslab.mechanics import (
    BeamSpec,
    FoundationSpec,
    collapse_class,
    collapse_index,
    critical_load,
    phase_diagram,
)

PA_TO_NMM = 1e-6


def foundation_for_delta(beam: BeamSpec, d: float, delta: float) -> FoundationSpec:
    """Foundation stiffness that puts the collapse index at delta."""
    ei = beam.youngs_modulus * PA_TO_NMM * beam.moment_of_inertia
    return FoundationSpec(16.0 * math.pi ** 4 * ei / (27.0 * delta * d ** 4))


def main():
    beam = BeamSpec(youngs_modulus=193e9, width=4.0, thickness=0.15,
                    length=450.0)
    d = 30.0
    l = 3.0 * d

    print("steel strip %.0fx%.2f mm, pixels every %.0f mm, "
          "rendering wavelength %.0f mm" % (beam.width, beam.thickness, d, l))
    print()

    # ==================================================================
    # critical loads per mode as the foundation stiffens
    # ==================================================================
    print("critical load N_cr(n) in N, softest mode starred")
    header = "  delta   " + "".join("    n=%d   " % n for n in range(1, 7))
    print(header)
    for delta in (20.0, 5.0, 2.25, 1.7, 1.0, 0.5):
        fnd = foundation_for_delta(beam, d, delta)
        loads = [critical_load(n, beam, fnd, l) for n in range(1, 7)]
        soft = int(np.argmin(loads))
        cells = "".join(
            (" %7.2f*" if i == soft else " %7.2f ") % loads[i]
            for i in range(6))
        verdict = collapse_class(beam.youngs_modulus,
                                 beam.moment_of_inertia,
                                 fnd.winkler_coefficient, d)
        print("  %5.2f  %s  %s" % (delta, cells, verdict))
    print()
    print("above delta = 2.25 mode 1 is the global minimum; below delta = 1")
    print("mode 3 undercuts it and the skeleton collapses into the pixels.")
    print()

    # ==================================================================
    # the same threshold as a material/geometry phase boundary
    # ==================================================================
    pd = phase_diagram((1e5, 1e9), (1e-8, 1e-4), resolution=5)
    print("phase map (rows: E/beta, cols: I/d^4; C = collapse)")
    for i, eob in enumerate(pd.e_over_beta):
        row = "".join(" C" if pd.collapse[i, j] else " ."
                      for j in range(len(pd.i_over_d4)))
        print("  E/beta=%8.1e %s" % (eob, row))
    eob = 1e7
    print("boundary at E/beta=1e7: I/d^4 = %.3e"
          % pd.boundary_i_over_d4(eob))
    print("(check: delta there = %.3f)"
          % collapse_index(eob / PA_TO_NMM, pd.boundary_i_over_d4(eob),
                           1.0, 1.0))


if __name__ == "__main__":
    main()
