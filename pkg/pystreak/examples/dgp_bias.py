from pystreak.dgpsim import DgpSpec, bias_surface, estimate_bias
from pystreak.exactdist import expected_difference


def main():
    n, k = 100, 3

    # --- Bias of a coin with no streakiness ---
    print("--- Bias of a coin with no streakiness ---")
    est = estimate_bias(DgpSpec.bernoulli(0.5), n, k, replications=10_000, seed=0)
    print(f"simulated: {est.bias:.4f} +/- {est.mc_se:.4f}")
    print(f"exact:     {float(expected_difference(n, k, 0.5)):.4f}")

    # --- A shooter who is sometimes hot ---
    print("\n--- A shooter who is sometimes hot ---")
    spec = DgpSpec.regime_shift(p_n=0.48, d=0.2, pi_h=0.1, q_hh=0.9)
    est = estimate_bias(spec, n, k, replications=10_000, seed=0)
    print(f"true shift {spec.true_d}, mean estimate {est.mean_diff:.4f}, bias {est.bias:.4f}")

    # --- Bias across shooting percentages ---
    print("\n--- Bias across shooting percentages ---")
    frame = bias_surface("positive_feedback", [0.4, 0.5, 0.6], [0.2], replications=2000, seed=0)
    print(frame[["fg", "d", "bias", "bernoulli_bias"]].round(4).to_string(index=False))


if __name__ == "__main__":
    main()
