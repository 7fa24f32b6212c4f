"""
Ambipolar transfer curves
=========================

Build a synthetic characterization library, look at where each curve
bottoms out, and interpolate between measured gate voltages.
"""

import io

import numpy as np

from gfet_prva import device

# ten curves: five drain biases, forward and reverse sweep
lib = device.synthetic_library()
for (bias, branch), curve in lib.items():
    print(f"v_ds={bias:.1f} V {branch.value}: dirac point at {curve.dirac_point:+.2f} V, "
          f"min current {curve.i_ds.min():.3e} A")

# the reverse sweep sits to the right of the forward sweep (hysteresis)
fwd = lib.get_curve(0.8, "F")
rev = lib.get_curve(0.8, "R")
print("hysteresis shift:", rev.dirac_point - fwd.dirac_point, "V")

# piecewise-linear lookup, clamped outside the measured range
v = np.array([-12.0, -1.0, 0.6, 2.5, 12.0])
print("I(v) =", device.interpolate_current(fwd, v))

# round trip through the CSV format used for measured data
text = device.save_characteristics(lib, unit="uA")
back = device.load_characteristics(io.StringIO(text))
print("curves after round trip:", len(back))
