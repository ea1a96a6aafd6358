from pystreak import BinarySequence
from pystreak.permtest import critical_values, exact_test, family_size, mc_test


def main():
    seq = BinarySequence.parse("HHHTHHTTHTHHHTTHTHHHTHHHHTTTHT")

    # --- Exact test ---
    print("--- Exact test ---")
    exact = exact_test(seq, 2)
    print(f"observed difference: {exact.observed_statistic:.4f}, p = {exact.p_value:.4f}")

    # --- Monte-Carlo test ---
    print("\n--- Monte-Carlo test ---")
    mc = mc_test(seq, 2, replications=20_000, seed=1)
    print(f"p = {mc.p_value:.4f} from {mc.replications} shuffles ({mc.discarded} undefined)")

    # --- Critical values per number of successes ---
    print("\n--- Critical values per number of successes ---")
    family = critical_values(30, 2, alpha=0.05)
    for n1, entry in family.entries.items():
        if entry.testable:
            threshold, tail = float(entry.value), float(entry.tail)
            print(f"n1={n1:>2}: reject when difference >= {threshold:.4f} (tail {tail:.4f})")
    print(f"size at p=.5: {float(family_size(family, 0.5)):.4f}")


if __name__ == "__main__":
    main()
