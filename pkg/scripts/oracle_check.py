"""Maximum analytic vs RK4 deviation over the R x gamma/kappa x delta/gamma grid."""
import itertools
import math

import numpy as np

from qbattery.laplace import amplitude_arrays
from qbattery.oracle import integrate_on_grid
from qbattery.params import InitialAmplitudes, SystemParams
from qbattery.runner import oracle_step


def main():
    init = InitialAmplitudes(1.0, 0.0)
    grid = np.linspace(0, 4 * math.pi, 2001)
    for R, gk, dg in itertools.product((0.01, 0.1, 1, 10, 100), (0.05, 1, 10), (0, 0.5, 2)):
        p = SystemParams(kappa=1.0, gamma=gk, lam=gk / R, delta=dg * gk)
        mu_a, nu_a = amplitude_arrays(p, init, grid)
        mu_o, nu_o = integrate_on_grid(p, init, grid, step=oracle_step(p))
        dev = max(np.abs(mu_a - mu_o).max(), np.abs(nu_a - nu_o).max())
        print(f"R={R:<6g} g/k={gk:<5g} d/g={dg:<4g} max dev {dev:.2e}")


if __name__ == "__main__":
    main()
