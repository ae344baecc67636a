"""Total turning of polygonal curves and the discrete Umlaufsatz.

The total curvature of a polygonal curve is the sum of its signed exterior
angles; simple closed curves always total +-2*pi.  The same bookkeeping
continues arg f' of a conformal map along a path: the image path's turning
minus the original path's turning.
"""

import math
import random

from quiltlab import curvature as cv

square = cv.PolygonalCurve(vertices=((0, 0), (1, 0), (1, 1), (0, 1)), closed=True)
print("ccw unit square turning:", cv.total_turning(square) / math.pi, "pi")
print("orientation sign:", cv.verify_hopf(square))

rnd = random.Random(0)
worst = 0.0
for _ in range(500):
    loop = cv.star_polygon(rnd.randrange(8, 60), rnd)
    worst = max(worst, abs(abs(cv.total_turning(loop)) - 2 * math.pi))
print(f"500 random star polygons: max |turning - 2pi| = {worst:.2e}")

# arg f' for f(z) = z^2 along the unit quarter-circle from 1 to i:
# arg f' = arg(2z) grows from 0 to pi/2
path = cv.circular_arc(1 + 0j, 1j, 128)
out = cv.discrete_arg_derivative(lambda z: z * z, 1 + 0j, 0.0, 1j, path)
print("arg f'(i) for f = z^2 continued along the arc:", out / math.pi, "pi",
      "(analytic value 0.5 pi)")
