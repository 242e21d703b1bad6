"""Linear-regret exhibit: the threshold adversary against deterministic
forecasters, next to a stochastic baseline that stays well calibrated.

Usage: python scripts/online_lower_bound.py [-T 1000] [--seed 0]

Prints sequence ECE / T per matchup.  Deterministic forecasters are
forced to ~T/2; the constant forecaster against matched Bernoulli labels
decays like 1/sqrt(T).
"""

import argparse

from calmeasures import (
    BernoulliAdversary,
    ConstantForecaster,
    GridRandomForecaster,
    RunningMeanForecaster,
    ThresholdAdversary,
    run,
    sequence_measure,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("-T", "--rounds", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    T = args.rounds

    matchups = [
        ("constant:0.5 vs threshold", ConstantForecaster(0.5),
         ThresholdAdversary()),
        ("running_mean vs threshold", RunningMeanForecaster(),
         ThresholdAdversary()),
        ("constant:0.3 vs bernoulli:0.3", ConstantForecaster(0.3),
         BernoulliAdversary(0.3)),
        ("grid_random:20 vs bernoulli:0.3", GridRandomForecaster(20),
         BernoulliAdversary(0.3)),
    ]
    print(f"T = {T}, seed = {args.seed}")
    for name, f, a in matchups:
        t = run(f, a, T, args.seed)
        seq = sequence_measure(t, "ece")
        print(f"  {name:34s} seq ECE = {seq:10.3f}   per round = {seq / T:.4f}")


if __name__ == "__main__":
    main()
