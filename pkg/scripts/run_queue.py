"""Run calibration jobs two at a time (the box has 2 CPUs)."""

import json
import sys
from multiprocessing import Pool

START_A = dict(phi_r=-0.12, amp_slow=0.1, d_slow=0.45, a_era=0.12, nu=12.0,
               xi=0.8, lev=0.8, alpha=0.6, beta=0.5, d_v=0.15, c_ev=0.3, v_ev=0.5)
START_B = dict(phi_r=0.0, amp_slow=0.05, d_slow=0.35, a_era=0.08, nu=5.5,
               xi=0.9, lev=2.0, alpha=0.3, beta=0.65, d_v=0.45, c_ev=0.15, v_ev=1.0)
D0 = {"sp500": 0.01, "djia": -0.02, "nasdaq": 0.035}


def one(job):
    index, seed, tag, start, maxiter = job
    from gen_returns import calibrate
    start = dict(start)
    start["d"] = D0[index]
    knobs, pen = calibrate(index, seed=seed, start=start, maxiter=maxiter,
                           restarts=0, verbose=False)
    out = f"cal_{index}_s{seed}{tag}.json"
    json.dump({"knobs": {k: float(v) for k, v in knobs.items()},
               "penalty": float(pen), "seed": seed}, open(out, "w"), indent=1)
    print(f"done {index} s{seed}{tag}: penalty {pen:.1f}", flush=True)
    return index, seed, tag, pen


if __name__ == "__main__":
    jobs = []
    which = sys.argv[1:] or ["sp500", "djia", "nasdaq"]
    for index in which:
        jobs += [(index, 1, "A", START_A, 1800), (index, 2, "A", START_A, 1800),
                 (index, 1, "B", START_B, 1800)]
    with Pool(2) as pool:
        for res in pool.imap_unordered(one, jobs):
            pass
    print("queue complete")
