"""Fractional derivative of an indicator against its two-sided width envelope."""

from fracnorm import lab


def main():
    print("alpha     p     h1     h2   quantity/lower  passed")
    for alpha in (0.3, 0.5, 0.7):
        p = 0.5 * (1 + 1 / alpha)
        for h1, h2 in ((0.2, 0.7), (0.4, 0.41), (0.05, 0.95)):
            r = lab.verify_indicator_bracket(alpha, p, h1, h2)
            print(f"{alpha:5.1f} {p:6.3f} {h1:6.2f} {h2:6.2f} {r.quantity / r.lower:14.4f}  "
                  f"{r.passed}")


if __name__ == "__main__":
    main()
