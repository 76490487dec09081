"""Return-path generator used to calibrate the bundled index datasets.

Builds daily log-return series with controllable stylized facts:

* two-piece (Fernandez-Steel) Student-t innovations -> daily skew/tails
* FIGARCH-style long-memory volatility with a leverage multiplier ->
  volatility clustering, aggregated negative skew
* fractional integration of the heteroskedastic shocks -> mean memory
* a stepwise AR(1)-across-months drift -> low-frequency persistence
* calendar-anchored crisis windows (extra vol, negative drift kicks) ->
  clustered drawdowns that shape monthly skew and long-scale persistence

Everything is driven by inverse-CDF transforms of a fixed uniform stream,
so the map (knobs -> statistics) is deterministic and nearly smooth for a
fixed seed; calibration runs Nelder-Mead on a penalty over the target
statistics.
"""

from __future__ import annotations

from datetime import date

import numpy as np
from scipy import signal, stats

from calendar_util import trading_days

# ---------------------------------------------------------------------------
# calendar-derived aggregation indices (computed once)
# ---------------------------------------------------------------------------

DAYS = trading_days()
N_RET = len(DAYS) - 1  # 8309 daily returns


def _boundaries(key) -> np.ndarray:
    """reduceat offsets so group k sums returns within period k."""
    keys = [key(d) for d in DAYS]
    # return t is the move from day t to day t+1; it belongs to the period
    # of day t+1, and period boundaries are where the key changes
    starts = [0]
    for t in range(1, N_RET):
        if keys[t + 1] != keys[t]:
            starts.append(t)
    return np.array(starts)


WEEK_STARTS = _boundaries(lambda d: d.isocalendar()[:2])
MONTH_STARTS = _boundaries(lambda d: (d.year, d.month))


def _month_index() -> np.ndarray:
    idx, seen = [], {}
    for d in DAYS:
        k = (d.year, d.month)
        if k not in seen:
            seen[k] = len(seen)
        idx.append(seen[k])
    return np.array(idx)


MONTH_OF_DAY = _month_index()
N_MONTHS = MONTH_OF_DAY[-1] + 1

# bull/bear era template: relative daily drift per regime (dimensionless
# shape; the a_era knob scales it in daily-sigma units).  Demeaned over the
# sample so it contributes shape, not total drift.  Segments are all >= 10
# months so the spectral content sits at monthly-and-above scales; the
# short crashes live in the crisis windows instead.
ERAS = [
    ("1992-01-02", "1995-01-31", 0.15),
    ("1995-02-01", "2000-03-24", 0.65),
    ("2000-03-27", "2002-10-09", -0.85),
    ("2002-10-10", "2007-10-09", 0.5),
    ("2007-10-10", "2009-03-09", -1.1),
    ("2009-03-10", "2014-12-31", 0.6),
    ("2015-01-02", "2016-06-30", 0.05),
    ("2016-07-01", "2019-12-31", 0.55),
    ("2020-01-02", "2021-12-31", 0.75),
    ("2022-01-03", "2022-10-12", -0.8),
    ("2022-10-13", "2024-12-30", 0.7),
]


def _era_shape() -> np.ndarray:
    w = np.zeros(N_RET)
    spans = [(date.fromisoformat(a), date.fromisoformat(b), s) for a, b, s in ERAS]
    for t in range(N_RET):
        d = DAYS[t + 1]
        for a, b, s in spans:
            if a <= d <= b:
                w[t] = s
                break
    return w - w.mean()


ERA_W = _era_shape()

# crisis windows (start, end, weight): month-scale clusters of turbulence
CRISES = [
    ("1997-10-20", "1997-11-14", 0.5),
    ("1998-08-03", "1998-10-09", 0.8),
    ("2000-03-13", "2000-05-26", 0.6),
    ("2001-02-26", "2001-04-06", 0.5),
    ("2001-09-14", "2001-10-12", 0.6),
    ("2002-06-17", "2002-07-26", 0.7),
    ("2008-09-08", "2008-12-05", 1.0),
    ("2010-05-03", "2010-06-11", 0.4),
    ("2011-07-25", "2011-09-30", 0.6),
    ("2015-08-17", "2015-09-04", 0.4),
    ("2018-02-02", "2018-02-16", 0.4),
    ("2018-10-08", "2018-12-24", 0.5),
    ("2020-02-24", "2020-04-03", 1.0),
    ("2022-01-17", "2022-06-17", 0.5),
]


def _crisis_weights() -> tuple[np.ndarray, np.ndarray]:
    """Crash-phase weights plus a mirrored rebound phase of equal length
    right after each window (V-shaped drawdowns: the range statistic sees
    the full excursion, linear detrending does not remove it)."""
    crash = np.zeros(N_RET)
    spans = []
    for a, b, wt in CRISES:
        a, b = date.fromisoformat(a), date.fromisoformat(b)
        idx = [t for t in range(N_RET) if a <= DAYS[t + 1] <= b]
        spans.append((idx, wt))
        crash[idx] = wt
    rebound = np.zeros(N_RET)
    for idx, wt in spans:
        length = len(idx)
        start = idx[-1] + 1
        rebound[start : start + length] = np.maximum(
            rebound[start : start + length], wt)
    return crash, rebound


CRISIS_W, REBOUND_W = _crisis_weights()


def aggregate(r: np.ndarray, starts: np.ndarray) -> np.ndarray:
    return np.add.reduceat(r, starts)


# ---------------------------------------------------------------------------
# innovations
# ---------------------------------------------------------------------------

def skewt_from_uniform(u: np.ndarray, nu: float, xi: float) -> np.ndarray:
    """Two-piece Student-t by inverse CDF; xi < 1 skews left.  Standardized
    empirically so the innovation sample has exact zero mean, unit variance."""
    p_neg = 1.0 / (1.0 + xi**2)
    z = np.empty_like(u)
    neg = u < p_neg
    z[neg] = stats.t.ppf(u[neg] * (1.0 + xi**2) / 2.0, nu) / xi
    z[~neg] = xi * stats.t.ppf(1.0 - (1.0 - u[~neg]) * (1.0 + xi**-2) / 2.0, nu)
    return (z - z.mean()) / z.std()


def figarch_lambda(alpha: float, beta: float, d_v: float, trunc: int) -> np.ndarray:
    lam = np.empty(trunc)
    delta = np.empty(trunc)
    lam[0] = alpha - beta + d_v
    delta[0] = d_v
    for i in range(1, trunc):
        delta[i] = (i - d_v) / (i + 1.0) * delta[i - 1]
        lam[i] = beta * lam[i - 1] + (delta[i] - alpha * delta[i - 1])
    return lam


def frac_int_weights(d: float, trunc: int) -> np.ndarray:
    k = np.arange(1.0, trunc + 1.0)
    w = np.empty(trunc + 1)
    w[0] = 1.0
    w[1:] = np.cumprod((k - 1.0 + d) / k)
    return w


# ---------------------------------------------------------------------------
# the generator
# ---------------------------------------------------------------------------

KNOB_NAMES = ("d", "phi_r", "amp_slow", "d_slow", "a_era", "nu", "xi", "lev",
              "alpha", "beta", "d_v", "c_ev", "v_ev", "rebound")

DEFAULTS = dict(d=0.01, phi_r=0.02, amp_slow=0.1, d_slow=0.4, a_era=0.1,
                nu=6.0, xi=0.88, lev=1.2, alpha=0.3, beta=0.6, d_v=0.45,
                c_ev=0.3, v_ev=0.8, rebound=0.6)

_TRUNC = 600
_BURN = 600
_SLOW_BURN = 200


class Innovations:
    """Fixed random streams for one seed; knob changes keep them fixed."""

    def __init__(self, seed: int, n: int = N_RET, n_months: int = N_MONTHS):
        rng = np.random.default_rng(seed)
        total = n + _BURN
        self.u = rng.random(total)
        self.slow = rng.standard_normal(n_months + _SLOW_BURN)
        self.n = n


def generate(knobs: dict, innov: Innovations) -> np.ndarray | None:
    """Daily log-returns (unit-ish variance, zero-ish mean); None if the
    FIGARCH weights go negative."""
    k = {**DEFAULTS, **knobs}
    lam = figarch_lambda(k["alpha"], k["beta"], k["d_v"], _TRUNC)
    if lam.min() < -1e-12:
        return None
    lam_rev = np.ascontiguousarray(lam[::-1])
    total = innov.n + _BURN

    z = skewt_from_uniform(innov.u, k["nu"], k["xi"])

    # crisis modifiers, aligned after the burn-in: crash kicks down, the
    # mirrored rebound phase recovers part of the drop (V shape)
    vmult = np.ones(total)
    kick = np.zeros(total)
    vmult[_BURN:] = 1.0 + k["v_ev"] * (CRISIS_W + 0.7 * REBOUND_W)
    kick[_BURN:] = -k["c_ev"] * (CRISIS_W - k["rebound"] * REBOUND_W)

    # volatility recursion on leverage-weighted squared shocks
    base = 1.0 - lam.sum()  # unconditional variance ~ 1
    if base <= 1e-6:
        base = 1e-6
    lev = k["lev"]
    lev_norm = 1.0 + 0.5 * lev
    w_hist = np.empty(total + _TRUNC)
    w_hist[:_TRUNC] = 1.0
    eps = np.empty(total)
    for t in range(total):
        s2 = base + np.dot(lam_rev, w_hist[t : t + _TRUNC])
        e = np.sqrt(s2) * z[t] * vmult[t] + kick[t]
        eps[t] = e
        w = e * e * (1.0 + lev if e < 0.0 else 1.0) / lev_norm
        w_hist[_TRUNC + t] = w

    # mean memory: fractional integration + light AR(1)
    g = signal.fftconvolve(eps, frac_int_weights(k["d"], _TRUNC))[:total]
    if abs(k["phi_r"]) > 1e-12:
        g = signal.lfilter([1.0], [1.0, -k["phi_r"]], g)
    g = g[_BURN:]

    # stepwise slow drift: fractionally integrated month-level noise,
    # constant within each month; self-similar persistence at all long
    # scales, with the noise/drift crossover set by amp_slow.
    psi_m = frac_int_weights(k["d_slow"], _SLOW_BURN + N_MONTHS)
    m = signal.fftconvolve(innov.slow, psi_m)[: innov.slow.size][_SLOW_BURN:]
    m = (m - m.mean()) / m.std()
    slow = k["amp_slow"] * m[MONTH_OF_DAY[1:]]

    return g + slow + k["a_era"] * ERA_W


# ---------------------------------------------------------------------------
# battery for calibration
# ---------------------------------------------------------------------------

def battery(r: np.ndarray) -> dict:
    import warnings as _w
    from lrdlab.dfa import dfa_analysis
    from lrdlab.rescaled_range import rs_analysis

    out = {}
    with _w.catch_warnings():
        _w.simplefilter("ignore")
        for tag, starts in (("d", None), ("w", WEEK_STARTS), ("m", MONTH_STARTS)):
            x = r if starts is None else aggregate(r, starts)
            dev = x - x.mean()
            m2 = np.mean(dev**2)
            out[f"skew_{tag}"] = np.mean(dev**3) / m2**1.5
            out[f"kurt_{tag}"] = np.mean(dev**4) / m2**2 - 3.0
            est_rs, fit_rs = rs_analysis(x)
            est_dfa, fit_dfa = dfa_analysis(x)
            out[f"rs_{tag}"] = est_rs.h
            out[f"rs_r2_{tag}"] = est_rs.r_squared
            out[f"rs_p_{tag}"] = est_rs.p_value
            out[f"dfa_{tag}"] = est_dfa.h
            out[f"dfa_r2_{tag}"] = est_dfa.r_squared
            out[f"dfa_p_{tag}"] = est_dfa.p_value
    return out


TARGETS = {
    "sp500": dict(skew_d=-0.410, kurt_d=10.9, skew_w=-0.821, kurt_w=7.25,
                  skew_m=-0.779, kurt_m=1.51, rs_d=0.564, rs_w=0.601, rs_m=0.664,
                  dfa_d=0.516, dfa_w=0.524, dfa_m=0.577),
    "djia": dict(skew_d=-0.408, kurt_d=13.0, skew_w=-0.987, kurt_w=9.38,
                 skew_m=-0.646, kurt_m=1.53, rs_d=0.552, rs_w=0.571, rs_m=0.621,
                 dfa_d=0.498, dfa_w=0.489, dfa_m=0.529),
    "nasdaq": dict(skew_d=-0.207, kurt_d=6.51, skew_w=-0.889, kurt_w=7.53,
                   skew_m=-0.733, kurt_m=2.04, rs_d=0.587, rs_w=0.619, rs_m=0.665,
                   dfa_d=0.531, dfa_w=0.536, dfa_m=0.560),
}

# DFA p-value bands (lo, hi) per frequency, from the qualitative pattern
DFA_P_BANDS = {
    "sp500": dict(d=(None, 0.04), w=(None, 0.04), m=(None, 0.005)),
    "djia": dict(d=(0.3, None), w=(0.3, None), m=(0.05, 0.4)),
    "nasdaq": dict(d=(None, 0.001), w=(None, 0.001), m=(None, 0.008)),
}

SCALES = dict(skew=0.025, kurt_d=0.3, kurt_w=0.3, kurt_m=0.2,
              rs=0.007, dfa=0.007)


def penalty(stats_out: dict, index: str) -> float:
    tgt = TARGETS[index]
    p = 0.0
    for tag in "dwm":
        p += ((stats_out[f"skew_{tag}"] - tgt[f"skew_{tag}"]) / SCALES["skew"]) ** 2
        p += ((stats_out[f"kurt_{tag}"] - tgt[f"kurt_{tag}"]) / SCALES[f"kurt_{tag}"]) ** 2
        p += ((stats_out[f"rs_{tag}"] - tgt[f"rs_{tag}"]) / SCALES["rs"]) ** 2
        p += ((stats_out[f"dfa_{tag}"] - tgt[f"dfa_{tag}"]) / SCALES["dfa"]) ** 2
        for kind in ("rs", "dfa"):
            r2 = stats_out[f"{kind}_r2_{tag}"]
            if r2 < 0.993:
                p += ((0.993 - r2) / 0.0008) ** 2
        lo, hi = DFA_P_BANDS[index][tag]
        pv = stats_out[f"dfa_p_{tag}"]
        if lo is not None and pv < lo:
            p += ((lo - pv) / max(lo, 1e-3) * 4.0) ** 2
        if hi is not None and pv > hi:
            p += ((pv - hi) / max(hi, 1e-3) * 4.0) ** 2
        if stats_out[f"rs_p_{tag}"] > 0.002:
            p += ((stats_out[f"rs_p_{tag}"] - 0.002) / 0.001) ** 2
    return p


# amp_slow and c_ev are in units of the daily innovation std (the series
# is generated at unit variance and rescaled to return units only when the
# CSVs are written)
_BOUNDS = dict(d=(-0.12, 0.12), phi_r=(-0.35, 0.35), amp_slow=(0.0, 0.6),
               d_slow=(0.1, 0.49), a_era=(0.0, 0.45), nu=(3.05, 25.0),
               xi=(0.6, 1.1), lev=(0.0, 6.0), alpha=(0.02, 0.95),
               beta=(0.02, 0.96), d_v=(0.05, 0.9), c_ev=(0.0, 1.2),
               v_ev=(0.0, 3.0), rebound=(0.0, 1.2))

# per-index d ranges keep the fitted mean-memory parameter on target
INDEX_BOUNDS = {
    "sp500": dict(d=(0.002, 0.05)),
    "djia": dict(d=(-0.05, 0.012)),
    "nasdaq": dict(d=(0.012, 0.08)),
}


def _bounds(index: str | None) -> dict:
    b = dict(_BOUNDS)
    if index in INDEX_BOUNDS:
        b.update(INDEX_BOUNDS[index])
    return b


def to_x(knobs: dict, index: str | None = None) -> np.ndarray:
    from scipy.special import logit

    b = _bounds(index)
    x = []
    for name in KNOB_NAMES:
        lo, hi = b[name]
        v = np.clip((knobs[name] - lo) / (hi - lo), 1e-6, 1 - 1e-6)
        x.append(logit(v))
    return np.array(x)


def from_x(x: np.ndarray, index: str | None = None) -> dict:
    from scipy.special import expit

    b = _bounds(index)
    knobs = {}
    for name, xi_ in zip(KNOB_NAMES, x):
        lo, hi = b[name]
        knobs[name] = lo + (hi - lo) * expit(xi_)
    return knobs


def show(index: str, knobs: dict, innov: Innovations) -> float:
    r = generate(knobs, innov)
    out = battery(r)
    pen = penalty(out, index)
    tgt = TARGETS[index]
    print(f"[{index}] penalty={pen:.2f}")
    for key in tgt:
        flag = ""
        tol = dict(skew=0.05, kurt=0.5, rs=0.02, dfa=0.02)[key.split("_")[0]]
        if abs(out[key] - tgt[key]) > tol:
            flag = "  <-- out"
        print(f"  {key}: {out[key]:+.4f} vs {tgt[key]:+.4f}{flag}")
    for tag in "dwm":
        print(f"  r2 {tag}: rs={out[f'rs_r2_{tag}']:.4f} dfa={out[f'dfa_r2_{tag}']:.4f} "
              f"p: rs={out[f'rs_p_{tag}']:.2e} dfa={out[f'dfa_p_{tag}']:.3f}")
    return pen


def calibrate(index: str, seed: int, start: dict | None = None,
              maxiter: int = 2000, restarts: int = 1, verbose: bool = True):
    from scipy import optimize

    innov = Innovations(seed)
    knobs0 = {**DEFAULTS, **(start or {})}
    lo, hi = _bounds(index)["d"]
    knobs0["d"] = np.clip(knobs0["d"], lo + 1e-4, hi - 1e-4)
    x0 = to_x(knobs0, index)
    n_eval = [0]

    def obj(x):
        n_eval[0] += 1
        r = generate(from_x(x, index), innov)
        if r is None:
            return 1e9
        return penalty(battery(r), index)

    best_x, best_f = x0, obj(x0)
    for round_i in range(restarts + 1):
        res = optimize.minimize(obj, best_x, method="Nelder-Mead",
                                options={"maxiter": maxiter, "adaptive": True,
                                         "xatol": 1e-4, "fatol": 1e-3})
        if res.fun < best_f:
            best_x, best_f = res.x, res.fun
    knobs = from_x(best_x, index)
    if verbose:
        print(f"evals={n_eval[0]}")
        show(index, knobs, innov)
        print("  knobs:", {k: round(float(v), 6) for k, v in knobs.items()})
    return knobs, best_f
