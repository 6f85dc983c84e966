"""Generate the synthetic demo dataset under data/demo/.

Headlines carry three-class logits driven by a latent daily tone; market
series are simulated with a GARCH(1,1)-t return process whose mean loads
on that tone and on the VIX. Exogenous series have scattered gaps so the
spline fill has work to do.

    python3 scripts/make_demo_data.py
"""

import csv
import datetime as dt
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "data" / "demo"
START, END = dt.date(2024, 1, 1), dt.date(2024, 7, 17)
HOLIDAYS = {
    dt.date(2024, 1, 1), dt.date(2024, 1, 15), dt.date(2024, 2, 19), dt.date(2024, 3, 29),
    dt.date(2024, 5, 27), dt.date(2024, 6, 19), dt.date(2024, 7, 4),
}
SOURCES = ["Capital Wire", "Daily Ledger", "Metro Times", "Evening Post", "Harbor Herald"]
SUBJECTS = ["Ukraine", "Russia", "Kyiv", "The Kremlin", "Zelensky", "Putin", "Russian forces", "Ukrainian troops"]
NEGATIVE = [
    "faces new missile strikes on energy grid", "warns of escalation near the border",
    "reports heavy losses in eastern offensive", "crisis deepens as talks stall",
    "war drags on with fresh attacks overnight", "sanctions threat looms over exports",
]
POSITIVE = [
    "secures new air defence pledge from allies", "wins grain corridor deal as exports recover",
    "reports gains after successful counteroffensive", "agrees prisoner exchange in rare breakthrough",
]
NEUTRAL = [
    "officials meet in Geneva for scheduled talks", "publishes quarterly budget figures",
    "leaders to attend summit next week", "announces changes to military command",
]
OTHER = [
    "Tech earnings beat expectations as chip demand climbs", "Central bank holds rates steady",
    "Retail sales edge higher in spring", "Oil prices slip on inventory build",
    "Housing starts fall for second month",
]


def days(a, b):
    d = a
    while d <= b:
        yield d
        d += dt.timedelta(days=1)


def main():
    rng = np.random.default_rng(20240117)
    calendar = list(days(START, END))
    trading = [d for d in calendar if d.weekday() < 5 and d not in HOLIDAYS]

    tone = {}
    level = -0.25
    for d in calendar:
        level = -0.25 + 0.8 * (level + 0.25) + rng.normal(0.0, 0.12)
        tone[d] = level

    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "headlines.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["date", "source", "title", "pos", "neg", "neu"])
        for d in calendar:
            for _ in range(1 + rng.poisson(6)):
                s = tone[d]
                if rng.random() < 0.15:
                    title = OTHER[rng.integers(len(OTHER))]
                else:
                    u = rng.random()
                    bucket = NEGATIVE if u < 0.5 - s else POSITIVE if u > 0.85 - s / 2 else NEUTRAL
                    title = f"{SUBJECTS[rng.integers(len(SUBJECTS))]} {bucket[rng.integers(len(bucket))]}"
                pos = 0.6 + 2.2 * s + rng.normal(0.0, 0.9)
                neg = 0.6 - 2.2 * s + rng.normal(0.0, 0.9)
                neu = 0.9 + rng.normal(0.0, 0.7)
                source = SOURCES[rng.integers(len(SOURCES))]
                if rng.random() < 0.06:
                    w.writerow([d.isoformat(), source, title, "", "", ""])
                else:
                    w.writerow([d.isoformat(), source, title, f"{pos:.4f}", f"{neg:.4f}", f"{neu:.4f}"])

    n = len(trading)
    vix = np.empty(n)
    ofr = np.empty(n)
    bond = np.empty(n)
    v, o, b = 14.0, -2.0, 4.05
    for i in range(n):
        v = 14.0 + 0.85 * (v - 14.0) + rng.normal(0.0, 0.9)
        o = -2.0 + 0.9 * (o + 2.0) + rng.normal(0.0, 0.15)
        b = b + rng.normal(0.0, 0.045)
        vix[i], ofr[i], bond[i] = max(v, 9.0), o, b
    epu = {d: float(np.exp(rng.normal(np.log(120.0), 0.35))) for d in calendar}

    omega, a1, b1, nu = 2e-6, 0.08, 0.88, 6.0
    sigma2 = omega / (1.0 - a1 - b1)
    eps_prev = 0.0
    price = 4742.83
    closes = [(dt.date(2023, 12, 29), price)]
    for i, d in enumerate(trading):
        sigma2 = omega + a1 * eps_prev**2 + b1 * sigma2
        z = rng.standard_t(nu) * np.sqrt((nu - 2.0) / nu)
        eps = np.sqrt(sigma2) * z
        r = 0.0004 + 0.004 * (tone[d] + 0.25) - 0.0006 * (vix[i] - 14.0) + eps
        price *= np.exp(r)
        closes.append((d, price))
        eps_prev = eps

    def gappy(values, rate):
        keep = rng.random(n) >= rate
        keep[0] = keep[-1] = True
        return [(trading[i], values[i]) for i in range(n) if keep[i]]

    def write(name, column, rows, fmt):
        with open(OUT / name, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["date", column])
            for d, val in rows:
                w.writerow([d.isoformat(), fmt.format(val)])

    write("sp500.csv", "close", closes, "{:.2f}")
    write("vix.csv", "value", gappy(vix, 0.06), "{:.2f}")
    write("bond.csv", "DGS10", gappy(bond, 0.04), "{:.3f}")
    write("ofr.csv", "OFR_FSI", gappy(ofr, 0.06), "{:.3f}")
    write("epu.csv", "value", sorted(epu.items()), "{:.2f}")


if __name__ == "__main__":
    main()
