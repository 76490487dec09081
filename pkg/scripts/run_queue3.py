"""Third round: random-search seeding, full NM, then a low-dimensional
polish on the highest-leverage knobs."""

import json
import sys
from multiprocessing import Pool

import numpy as np
from scipy import optimize

from gen_returns import (
    KNOB_NAMES, Innovations, _bounds, battery, from_x, generate, penalty, to_x,
)

CENTers = {
    "sp500": dict(d=0.008, phi_r=-0.2, amp_slow=0.02, d_slow=0.45, a_era=0.07,
                  nu=6.0, xi=0.82, lev=4.0, alpha=0.45, beta=0.6, d_v=0.3,
                  c_ev=0.6, v_ev=0.3, rebound=0.6),
    "djia": dict(d=-0.03, phi_r=-0.13, amp_slow=0.01, d_slow=0.4, a_era=0.04,
                 nu=15.0, xi=0.76, lev=2.5, alpha=0.7, beta=0.6, d_v=0.15,
                 c_ev=0.55, v_ev=0.25, rebound=0.5),
    "nasdaq": dict(d=0.03, phi_r=-0.1, amp_slow=0.02, d_slow=0.45, a_era=0.08,
                   nu=8.0, xi=0.9, lev=3.5, alpha=0.45, beta=0.6, d_v=0.3,
                   c_ev=0.55, v_ev=0.3, rebound=0.6),
}

POLISH = ("d", "phi_r", "a_era", "amp_slow", "c_ev", "lev", "rebound")


def calibrate_smart(index, seed, n_random=70, rng_seed=0):
    innov = Innovations(seed)
    rng = np.random.default_rng(rng_seed)
    bounds = _bounds(index)

    def evaluate(knobs):
        r = generate(knobs, innov)
        if r is None:
            return 1e9
        return penalty(battery(r), index)

    def obj(x):
        return evaluate(from_x(x, index))

    # stage 0: random search around the curated center (logit-space gaussian)
    center = dict(CENTers[index])
    lo, hi = bounds["d"]
    center["d"] = float(np.clip(center["d"], lo + 1e-4, hi - 1e-4))
    x_c = to_x(center, index)
    best_x, best_f = x_c, obj(x_c)
    for _ in range(n_random):
        x = x_c + rng.normal(0, 0.7, x_c.size)
        f = obj(x)
        if f < best_f:
            best_x, best_f = x, f

    # stage 1: full NM
    res = optimize.minimize(obj, best_x, method="Nelder-Mead",
                            options={"maxiter": 2000, "adaptive": True,
                                     "xatol": 1e-4, "fatol": 1e-3})
    if res.fun < best_f:
        best_x, best_f = res.x, res.fun

    # stage 2: polish the leverage knobs with the rest frozen
    frozen = from_x(best_x, index)
    idx_polish = [KNOB_NAMES.index(k) for k in POLISH]

    def obj_sub(sub):
        x = best_x.copy()
        x[idx_polish] = sub
        return obj(x)

    res2 = optimize.minimize(obj_sub, best_x[idx_polish], method="Nelder-Mead",
                             options={"maxiter": 900, "adaptive": True})
    if res2.fun < best_f:
        best_x = best_x.copy()
        best_x[idx_polish] = res2.x
        best_f = res2.fun

    # stage 3: short full NM from the polished point
    res3 = optimize.minimize(obj, best_x, method="Nelder-Mead",
                             options={"maxiter": 800, "adaptive": True})
    if res3.fun < best_f:
        best_x, best_f = res3.x, res3.fun
    return from_x(best_x, index), best_f


def one(job):
    index, seed = job
    knobs, pen = calibrate_smart(index, seed, rng_seed=seed * 7 + 1)
    out = f"cal_{index}_s{seed}R.json"
    json.dump({"knobs": {k: float(v) for k, v in knobs.items()},
               "penalty": float(pen), "seed": seed}, open(out, "w"), indent=1)
    print(f"done {index} s{seed}R: penalty {pen:.1f}", flush=True)
    return pen


if __name__ == "__main__":
    seeds = [int(s) for s in sys.argv[1:]] or [1, 2]
    jobs = [(index, s) for s in seeds for index in ("sp500", "djia", "nasdaq")]
    with Pool(2) as pool:
        for _ in pool.imap_unordered(one, jobs):
            pass
    print("queue3 complete")
