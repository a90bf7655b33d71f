"""How many random networks it takes to tell squeezed from thermal light at 20% efficiency.

Each row repeats the comparison 20 times on fresh networks and counts the
runs whose NM difference exceeds three combined standard errors.

    python3 demos/discrimination.py
"""

from gbscorr import ExperimentConfig, repeated_discrimination


def main():
    a = ExperimentConfig.matched("squeezed", 1.0, eta=0.2)
    b = ExperimentConfig.matched("thermal", 1.0, eta=0.2)
    print("trials  3-sigma runs  mean |z|")
    for trials in (10, 20, 50, 100):
        reports = repeated_discrimination(a, b, trials, repeats=20, statistic="nm", bootstrap_rounds=500)
        hits = sum(r.distinguishable for r in reports)
        mean_z = sum(abs(r.significance) for r in reports) / len(reports)
        print(f"{trials:6d}  {hits:9d}/20  {mean_z:8.2f}")


if __name__ == "__main__":
    main()
