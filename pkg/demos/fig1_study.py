"""Monte-Carlo comparison of plain and scaled LASSO on the Gaussian-basis problem.

Runs both bundled configurations (narrow and wide basis functions) and prints,
per path step, the mean model size, the actual risks and the SURE bias in
standard-error units.  Usage::

    python3 demos/fig1_study.py [trials]
"""

import sys

import numpy as np

from scaledlasso import SimConfig, run_trials


def main(trials=200):
    for tau in (0.1, 0.4):
        rep = run_trials(SimConfig(tau=tau, trials=trials, n_jobs=-1))
        r = rep.records
        print(f"\ntau = {tau}: {trials} trials")
        print(" step     k   risk plain  risk scaled   z plain  z scaled")
        for i in range(rep.n_records):
            z_p = r["diff_plain"][i] / r["diff_plain_se"][i]
            z_s = r["diff_scaled"][i] / r["diff_scaled_se"][i]
            print(f"{i + 1:5d} {r['k'][i]:5.2f} {r['risk_plain'][i]:12.4f} {r['risk_scaled'][i]:12.4f} {z_p:9.2f} {z_s:9.2f}")
        for crit in ("plain", "scaled"):
            k = rep.selection_array(f"{crit}_k")
            risk = rep.selection_array(f"{crit}_risk")
            print(f"SURE-{crit} selection: mean k {k.mean():.2f}, mean risk {risk.mean():.4f}")
        print(f"mean noise estimate {np.mean(rep.selection_array('sigma2_hat')):.4f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 200)
