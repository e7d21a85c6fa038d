"""Sup-ratio of the fractional potential near both ends of the Sobolev range.

Left end: f0 with the one-sided kernel as p -> 1+.
Right end: h_delta (delta = 0.1) with the Riesz kernel as p -> (1/alpha)-.
Each sample is printed next to the analytic upper envelope k_upper(alpha, 1, p, S=10).
"""

from fracnorm import constants, lab
from fracnorm.funcspace import make_f0, make_h_delta


def main():
    for alpha in (0.3, 0.5, 0.7):
        print(f"alpha = {alpha}")
        left = [lab.empirical_k_lower(alpha, 1 + 2.0**-k, [make_f0()]) for k in range(3, 9)]
        fam = [make_h_delta(0.1, alpha)]
        right = [lab.empirical_k_lower(alpha, (1 - 2.0**-k) / alpha, fam, kernel="two_sided")
                 for k in range(3, 9)]
        for side, samples in (("left", left), ("right", right)):
            for s in samples:
                ku = constants.k_upper(alpha, 1, s.p, 10.0)
                print(f"  {side:5s} p={s.p:.6f} ratio={s.ratio:.4f} k_upper={ku:.4f} "
                      f"ratio/k_upper={s.ratio / ku:.3f}")
            print(f"  {side} slope {lab.blowup_slope(samples, side):+.4f} "
                  f"(target {-(1 - alpha):+.4f})")


if __name__ == "__main__":
    main()
