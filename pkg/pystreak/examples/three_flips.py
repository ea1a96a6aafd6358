from fractions import Fraction

from pystreak import BinarySequence, estimates, expected_proportion
from pystreak.oracle import enumerate_sequences, tabulate


def main():
    # --- Every sequence of three flips ---
    print("--- Every sequence of three flips ---")
    table = tabulate(3)
    print(table[["sequence", "selected", "proportion_exact"]].to_string(index=False))

    # The average over sequences with a defined proportion
    result = enumerate_sequences(3, 1, Fraction(1, 2))
    print(f"Expected proportion of heads after heads: {result.expectation}")

    # --- Exact recursion against brute force ---
    print("\n--- Exact recursion against brute force ---")
    for n in (3, 10, 20):
        exact = expected_proportion(n, 1, Fraction(1, 2))
        print(f"n={n:>2}: E[proportion] = {exact} ({float(exact):.4f})")

    # --- Statistics of one observed sequence ---
    print("\n--- Statistics of one observed sequence ---")
    est = estimates(BinarySequence.parse("HHTHHHTT"), 1)
    print(f"counts: {est.counts.as_tuple()}")
    print(f"p(H | H) = {est.p_after_hits.value}, difference = {est.difference}")


if __name__ == "__main__":
    main()
