"""Tables for the factor parameter arithmetic.

Prints the interpolation parameter of the coupled model's factor over a
range of n, then sweeps the two-branch free product formula across the
branch threshold for one (r, d) pair.

Example:
    python scripts/factor_parameters.py --max-n 12 --r 3 --d 2
"""
import argparse
from fractions import Fraction

from ncfree.factors import dykema_free_product, m3_parameter, vn_z_description
from ncfree.model import ModelParams


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=12)
    ap.add_argument("--r", default="3")
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--steps", type=int, default=8,
                    help="alpha sweep points on each side of the threshold")
    args = ap.parse_args()

    print(f"{'n':>4} {'generator algebra':>22} {'parameter':>12} {'float':>10}")
    for n in range(2, args.max_n + 1):
        params = ModelParams(n)
        desc = vn_z_description(params).display()
        value = m3_parameter(params)
        print(f"{n:>4} {desc:>22} {str(value):>12} {float(value):10.6f}")

    r = Fraction(args.r)
    d = args.d
    threshold = Fraction(1, d * d)
    print(f"\nbranch sweep for r={r}, d={d} (threshold alpha = {threshold}):")
    print(f"{'alpha':>10}  description")
    alphas = [threshold * Fraction(k, args.steps + 1)
              for k in range(1, args.steps + 1)]
    alphas += [threshold]
    alphas += [threshold + (1 - threshold) * Fraction(k, args.steps + 1)
               for k in range(1, args.steps + 1)]
    for alpha in alphas:
        desc = dykema_free_product(r, alpha, d)
        marker = " <- threshold" if alpha == threshold else ""
        print(f"{str(alpha):>10}  {desc.display()}{marker}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
