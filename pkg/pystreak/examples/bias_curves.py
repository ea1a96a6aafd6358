from pystreak.closedform import swor_curve
from pystreak.exactdist import bias_curve


def main():
    # --- Expected proportion after k successes ---
    print("--- Expected proportion after k successes ---")
    curve = bias_curve(range(10, 101, 10), [1, 2, 3], [0.5])
    print(curve.pivot(index="n", columns="k", values="expected").round(4).to_string())

    # --- Expected difference between the two streak rates ---
    print("\n--- Expected difference between the two streak rates ---")
    diff = bias_curve(range(10, 101, 10), [1, 2, 3], [0.5], statistic="difference")
    print(diff.pivot(index="n", columns="k", values="expected").round(4).to_string())

    # --- Sampling without replacement as a benchmark ---
    print("\n--- Sampling without replacement as a benchmark ---")
    frame = swor_curve(range(10, 101, 30), [1, 3], 0.5)
    print(frame[["n", "k", "swor_bias", "streak_bias"]].round(4).to_string(index=False))


if __name__ == "__main__":
    main()
