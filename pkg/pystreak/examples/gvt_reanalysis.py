from pystreak.reanalysis import adjust_external, load_gvt, player_table, pooled_simple, study_tests


def main():
    players = load_gvt()

    # --- Player-level differences before and after the adjustment ---
    print("--- Player-level differences before and after the adjustment ---")
    table = player_table(players)
    columns = ["player", "n", "p", "gvt_diff", "adjusted_diff", "z"]
    print(table[columns].round(3).to_string(index=False))

    # --- Study-level tests ---
    print("\n--- Study-level tests ---")
    result = study_tests(players)
    print(f"raw mean {result.mean_raw_diff:.3f} (p = {result.raw_p:.2f})")
    print(f"adjusted mean {result.mean_adjusted_diff:.3f} (se {result.study_se:.3f})")
    print(f"one-sided p = {result.adjusted_p:.4f}")
    print(f"{result.positive_count} of {result.included} players positive")
    print(f"{result.significant_count} players individually significant")

    # --- Pooled shots ---
    print("\n--- Pooled shots ---")
    pooled = pooled_simple(players)
    print(f"{pooled.estimate:.3f} (se {pooled.se:.3f}) over {pooled.category_shots} shots")

    # --- A study reported only as averages ---
    print("\n--- A study reported only as averages ---")
    print(f"adjusted difference: {adjust_external(0.52, 0.54, n=40, p=0.5):+.3f}")


if __name__ == "__main__":
    main()
