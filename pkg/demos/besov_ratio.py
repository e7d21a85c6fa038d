"""Besov ratio of indicators against 1/Gamma(1 - alpha).

The ratio approaches the bound at p = 1 and falls away as p nears 1/alpha,
because the modulus part of the Besov norm grows faster than the Lp part.
"""

import numpy as np

from fracnorm import lab
from fracnorm.funcspace import make_indicator
from fracnorm.special import gamma


def main():
    f = make_indicator(0.05, 0.95)
    for alpha in (0.3, 0.5, 0.7):
        bound = 1 / gamma(1 - alpha)
        for p in np.linspace(1.0, 1 / alpha - 0.1, 4):
            r = lab.besov_ratio(f, alpha, p)
            print(f"alpha={alpha} p={p:.3f} ratio/bound={r / bound:.3f}")


if __name__ == "__main__":
    main()
