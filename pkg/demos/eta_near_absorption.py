"""How the flow derivative eta behaves as a path is absorbed at 0.

eta_t = exp(((1 - delta)/2) A_t) with A_t = int ds / rho_s^2.  At absorption A
diverges, so eta blows up for delta < 1, stays at 1 for delta = 1 and
vanishes for delta > 1.  D = rho * eta still goes to 0 in every case.  The
floor eps0 stands in for the origin; shrinking it shows the trend.

Run: python demos/eta_near_absorption.py
"""

from besselbel.pathsim import SamplerConfig
from besselbel.verifier import eta_blowup_check

x = 0.05
T = 5 * x * x
for delta in (0.0, 0.5, 1.0, 1.5):
    rep = eta_blowup_check(delta, x, T, 500, [1e-2, 1e-3, 1e-4], SamplerConfig(seed=7))
    print(f"delta = {delta}: {'ok' if rep.passed else 'trend broken'}")
    for row in rep.details["rows"]:
        print(f"   eps0={row['floor']:.0e}  median A={row['A_median']:8.3f}  "
              f"median max eta={row['max_eta_median']:10.4g}  median D at hit={row['D_median']:.2e}")
