"""Print the MPZ region and the exponent suprema for every built-in claim set."""

from mpzkit.exponents import claim_sets, max_distribution_exponent, mpz_region


def main():
    for name, levels in (("newtypeFull", (1, 2, 4)), ("newtypeElementary", (2, 4)), ("zhangOriginal", (1,))):
        cs = claim_sets(name)
        for i in levels:
            print(f"{name} i={i}")
            print(f"  region: {mpz_region(cs, i)}")
            for policy in ("zero", "ray(1)"):
                print(f"  sup 2*varpi, delta policy {policy}: {max_distribution_exponent(cs, i, policy)}")


if __name__ == "__main__":
    main()
