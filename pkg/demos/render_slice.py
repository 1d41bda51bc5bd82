"""Render a real-plane slice for m=5, delta=3 and report its classes.

Run: python3 demos/render_slice.py [output.ppm]
"""

import sys

from henon_fatou.dynamics import Params
from henon_fatou.render import SliceSpec, render, write_outputs
from henon_fatou.sets import WSchedule

p = Params(5, 3.0)
R0 = WSchedule.from_params(p).R0
# box [R0, 20 R0]^2 in the (Re z, Re w) plane
spec = SliceSpec("real-plane", complex(10.5 * R0, 10.5 * R0), complex(19 * R0, 19 * R0), 256, 256)
raster = render(spec, p, threads=4)

print("class counts:", raster.class_counts())
print("cycle periods seen:", raster.resolved_periods())
out = sys.argv[1] if len(sys.argv) > 1 else "slice_m5.ppm"
for path in write_outputs(raster, out):
    print("wrote", path)
