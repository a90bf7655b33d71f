"""Closed-form NM of noisy squeezed light against squeezing and added noise.

Prints the grid with the squeezing needed to stay below vacuum in one quadrature.

    python3 demos/noise_map.py
"""

import numpy as np

from gbscorr import run_heatmap


def main():
    r = np.linspace(0.2, 1.4, 7)
    nu = np.array([0.0, 0.25, 0.5, 0.75])
    res = run_heatmap(8, 2, r, nu_values=nu)
    print("nu \\ r " + "".join(f"{x:8.2f}" for x in r) + "   r_min")
    for i, v in enumerate(nu):
        row = "".join(f"{x:8.3f}" for x in res.nm[:, i])
        print(f"{v:6.2f} {row}   {res.boundary[i]:.3f}")


if __name__ == "__main__":
    main()
