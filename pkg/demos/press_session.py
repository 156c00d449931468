"""Latency anatomy of a rendered press, frame by frame.

Feeds a short fingertip trace through the full pipeline simulation: each
frame waits out the processing budget, is planned into pixel and
compression commands, and the servo field slews toward them at 125 mm/s.
Actuation lag here is the peak-probe time: how long until the displayed
summit comes within a quarter pitch of where the finger actually is.  A
release frame renders a flat field, so it has no peak to acquire and no
actuation entry.
"""
import argparse
import sys

import numpy as np

from crslab.control import (
    FingertipSample,
    ServoSpec,
    SessionConfig,
    run_session,
)
from crslab.fields import make_lattice


def trace_press_and_slide():
    """Press down off centre, slide toward the middle, lift."""
    return [
        FingertipSample(0.0, 7.0, -13.0, 5.0),
        FingertipSample(180.0, 2.0, -5.0, 7.0),
        FingertipSample(360.0, 0.0, 0.0, 7.0),
        FingertipSample(540.0, 0.0, 0.0, 0.0),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vr", action="store_true",
                    help="charge the full VR pipeline budget instead of "
                    "the on-device one")
    args = ap.parse_args(argv)

    lat = make_lattice("hexagonal", 30.0, 60.0)
    cfg = SessionConfig(lattice=lat, vr_originated=args.vr)
    trace = trace_press_and_slide()

    print("session: %d frames on a %d-pixel hexagonal display"
          % (len(trace), lat.n_pixels))
    print("processing budget %g ms (%s), servo %g mm at %g mm/s"
          % (cfg.processing_delay_ms,
             "vr pipeline" if args.vr else "on-device",
             cfg.servo.travel, cfg.servo.rate_mm_per_ms * 1000.0))
    print()

    log = run_session(trace, cfg)

    print("%6s %6s %12s %11s %9s %7s" %
          ("t_ms", "z_mm", "processing", "actuation", "total", "clamps"))
    for f in log.frames:
        if f.skipped:
            print("%6g %6g   skipped: %s" % (f.sample.t_ms, f.sample.z_f,
                                             f.violation))
            continue
        act = "%11g" % f.actuation_ms if f.actuation_ms is not None else \
            "%11s" % "-"
        tot = "%9g" % f.total_latency_ms if f.total_latency_ms is not None \
            else "%9s" % "-"
        print("%6g %6g %12g %s %s %7d"
              % (f.sample.t_ms, f.sample.z_f, f.processing_ms, act, tot,
                 len(f.clamps)))
    print()
    print("mean actuation %.0f ms over %d channels, %d violations"
          % (log.mean_actuation_ms, len(log.channel_names),
             len(log.violations)))
    state = log.final_state
    print("final state: max pixel %.2f mm (released: %s)"
          % (float(np.max(state)), bool(np.all(state < 1e-9))))
    print()
    print("latency is dominated by the fixed processing budget: the summit")
    print("forms near the right pixels early in the stroke, so the peak is")
    print("acquired within a few servo steps, and a slide that stays within")
    print("a quarter pitch of the old peak costs no acquisition time at all.")
    return 0


if __name__ == "__main__":
    sys.exit(main())
