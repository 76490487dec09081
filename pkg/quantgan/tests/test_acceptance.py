"""Secondary acceptance: interop with the evaluation pipeline through the
ensemble file format, and a tail-heaviness property of generated returns.
Numerical table agreement is explicitly not gated."""

import json
import subprocess
import sys

import numpy as np
import pytest

from quantgan import GanConfig, generate, load_returns_csv, train, write_ensemble


def check(name, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
    assert ok, f"{name}: {detail}"


def run_lrdlab(*args):
    return subprocess.run([sys.executable, "-m", "lrdlab.cli", *args],
                          capture_output=True, text=True)


@pytest.fixture(scope="module")
def sp500_returns(tmp_path_factory):
    out = tmp_path_factory.mktemp("ingest")
    rc = run_lrdlab("ingest", "--data", "sp500", "--out-dir", str(out))
    assert rc.returncode == 0, rc.stderr
    return out / "returns_daily.csv", out / "prices_daily.csv"


@pytest.fixture(scope="module")
def trained(sp500_returns):
    returns_csv, _ = sp500_returns
    returns = load_returns_csv(returns_csv)
    return train(returns, GanConfig(seed=0)), returns


def excess_kurtosis(x):
    dev = x - x.mean()
    return float(np.mean(dev**4) / np.mean(dev**2) ** 2 - 3.0)


def test_interop_evaluate_completes(trained, sp500_returns, tmp_path):
    ckpt, _ = trained
    _, prices_csv = sp500_returns

    length = 2048
    paths = generate(ckpt, n_paths=1000, length=length, seed=1)
    ens = write_ensemble(paths, tmp_path / "gan.bin")

    lines = prices_csv.read_text().splitlines()
    trunc = tmp_path / "prices_2048.csv"
    trunc.write_text("\n".join(lines[: length + 1]) + "\n")

    rc = run_lrdlab("evaluate", "--data", str(trunc), "--ensemble", str(ens),
                    "--out-dir", str(tmp_path))
    check("Interop: evaluate completes on a 1000x2048 GAN ensemble",
          rc.returncode in (0, 2), f"rc={rc.returncode} {rc.stderr[-200:]}")
    report = json.loads((tmp_path / "evaluation_report.json").read_text())
    check("Interop: generated file passes ensemble validation and selection",
          report["selected_index"] < 1000 and report["rs"] is not None
          and report["dfa"] is not None,
          f"selected={report['selected_index']}")


def test_generated_returns_are_heavy_tailed(trained, sp500_returns):
    _, returns = trained
    ckpt0, _ = trained
    kurts = []
    for seed in (0, 1, 2):
        ckpt = ckpt0 if seed == 0 else train(returns, GanConfig(seed=seed))
        sample = generate(ckpt, n_paths=20, length=1024, seed=seed + 50)
        kurts.append(excess_kurtosis(np.diff(sample, axis=1).ravel()))
    majority = sum(k > 1.0 for k in kurts)
    check("Generated daily returns show excess kurtosis > 1 (3-seed majority)",
          majority >= 2, f"kurts={[round(k, 2) for k in kurts]}")
