"""Build the bundled index CSVs from calibrated generator knobs.

Reads cal_<index>_s<seed>.json files produced by gen_returns.calibrate,
keeps the best seed per index, rescales the unit-variance returns to
realistic daily volatility and price levels, writes date,close CSVs into
src/lrdlab/data/, then re-verifies the full battery (and the ARFIMA-FIGARCH
fitted d_m) on the files exactly as the package will load them.

Usage: python3 make_bundled_data.py [--adjust-d] [--write]
"""

from __future__ import annotations

import argparse
import glob
import json
import re
import sys
from pathlib import Path

import numpy as np

from gen_returns import DAYS, Innovations, TARGETS, battery, generate
from lrdlab.arfima_figarch import fit as af_fit
from lrdlab.series import downsample, load_prices, log_returns, Frequency

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "lrdlab" / "data"

ANCHORS = {
    # initial price, final price, daily return std
    "sp500": (417.26, 5906.94, 0.0117),
    "djia": (3172.41, 42573.73, 0.0111),
    "nasdaq": (586.34, 19486.79, 0.0152),
}

# fitted-d_m gates for the daily series (phase B)
DM_TARGETS = {"sp500": 7.95e-3, "djia": None, "nasdaq": 0.0383}

TOL = dict(skew=0.05, kurt=0.5, rs=0.02, dfa=0.02)


def best_candidates() -> dict:
    found = {}
    for path in glob.glob(str(Path(__file__).parent / "cal_*_s*.json")):
        m = re.match(r"cal_(\w+)_s(\d+)\.json", Path(path).name)
        if not m:
            continue
        index, seed = m.group(1), int(m.group(2))
        payload = json.load(open(path))
        cur = found.get(index)
        if cur is None or payload["penalty"] < cur["penalty"]:
            found[index] = {"seed": seed, **payload}
    return found


def returns_to_prices(r_unit: np.ndarray, index: str) -> np.ndarray:
    p0, p_end, std = ANCHORS[index]
    r = r_unit * std
    r = r + (np.log(p_end / p0) - r.sum()) / r.size
    prices = p0 * np.exp(np.concatenate(([0.0], np.cumsum(r))))
    return np.round(prices, 2)


def write_csv(index: str, prices: np.ndarray) -> Path:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    out = DATA_DIR / f"{index}.csv"
    with out.open("w", encoding="utf-8") as fh:
        fh.write("date,close\n")
        for d, p in zip(DAYS, prices):
            fh.write(f"{d.isoformat()},{p:.2f}\n")
    return out


def verify_file(index: str, run_fit: bool = True) -> tuple[bool, dict]:
    """Re-load the written CSV and check every gated statistic."""
    p = load_prices(DATA_DIR / f"{index}.csv", label=index)
    series = {"d": log_returns(p).values,
              "w": log_returns(downsample(p, Frequency.WEEKLY)).values,
              "m": log_returns(downsample(p, Frequency.MONTHLY)).values}
    assert len(p) == 8310, len(p)
    assert series["w"].size == 1722 and series["m"].size == 395

    out = battery(series["d"])
    tgt = TARGETS[index]
    ok = True
    print(f"--- {index}: battery on written file")
    for key, target in tgt.items():
        kind = key.split("_")[0]
        err = out[key] - target
        inside = abs(err) <= TOL[kind]
        margin = TOL[kind] - abs(err)
        flag = "" if margin > 0.2 * TOL[kind] else ("  MARGINAL" if inside else "  ** OUT **")
        ok &= inside
        print(f"  {key:8s} {out[key]:+.4f} vs {target:+.4f} (err {err:+.4f}){flag}")
    for tag in "dwm":
        r2ok = out[f"rs_r2_{tag}"] >= 0.99
        pok = out[f"rs_p_{tag}"] < 0.01
        ok &= r2ok and pok
        print(f"  rs {tag}: r2={out[f'rs_r2_{tag}']:.4f} p={out[f'rs_p_{tag}']:.2e}"
              f" dfa r2={out[f'dfa_r2_{tag}']:.4f} p={out[f'dfa_p_{tag}']:.4f}")
    dfa_ok = {
        "sp500": out["dfa_p_d"] < 0.05,
        "djia": out["dfa_p_d"] > 0.05,
        "nasdaq": out["dfa_p_d"] < 0.05,
    }[index]
    ok &= dfa_ok
    print(f"  daily dfa p pattern ok: {dfa_ok}")

    result = {}
    if run_fit:
        res = af_fit(series["d"])
        result["fit"] = res
        print(f"  fit: d_m={res.params.d_m:.5f} p_dm={res.p_dm} d_v={res.params.d_v:.3f}"
              f" nu={res.params.nu:.2f} conv={res.converged}")
        if DM_TARGETS[index] is None:
            pin_ok = res.p_dm == 0.5
            ok &= pin_ok
            print(f"  d_m pinned at boundary: {pin_ok}")
        else:
            dm_ok = abs(res.params.d_m - DM_TARGETS[index]) <= 0.018
            ok &= dm_ok
            print(f"  |d_m - {DM_TARGETS[index]}| = "
                  f"{abs(res.params.d_m - DM_TARGETS[index]):.4f} ok={dm_ok}")
    return ok, result


def build(index: str, cand: dict, write: bool = True) -> None:
    innov = Innovations(cand["seed"])
    r_unit = generate(cand["knobs"], innov)
    prices = returns_to_prices(r_unit, index)
    if write:
        path = write_csv(index, prices)
        print(f"wrote {path} (seed {cand['seed']}, penalty {cand['penalty']:.1f})")


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--skip-fit", action="store_true")
    ap.add_argument("--index", default=None)
    args = ap.parse_args(argv)
    cands = best_candidates()
    indexes = [args.index] if args.index else sorted(cands)
    all_ok = True
    for index in indexes:
        build(index, cands[index])
        ok, _ = verify_file(index, run_fit=not args.skip_fit)
        all_ok &= ok
        print(f"=== {index} {'OK' if ok else 'FAILED'}\n")
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
