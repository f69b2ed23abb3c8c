"""Regenerates the synthetic input fixtures in data/fixtures.

Prices are seeded geometric random walks written in the Yahoo daily-history
layout; case counts follow the JHU CSSE wide global layout. The last crude oil
row is a real quote kept verbatim.
"""
import datetime as dt
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent / "fixtures"
START = dt.date(2019, 1, 2)
END = dt.date(2020, 4, 7)
HOLIDAYS = {dt.date(2019, 1, 21), dt.date(2019, 2, 18), dt.date(2019, 4, 19), dt.date(2019, 5, 27),
            dt.date(2019, 7, 4), dt.date(2019, 9, 2), dt.date(2019, 11, 28), dt.date(2019, 12, 25),
            dt.date(2020, 1, 1), dt.date(2020, 1, 20), dt.date(2020, 2, 17)}


def trading_days():
    d = START
    while d <= END:
        if d.weekday() < 5 and d not in HOLIDAYS:
            yield d
        d += dt.timedelta(days=1)


def write_ohlcv(name, start_price, vol, seed, skip=(), null_dates=(), last_row=None):
    rng = np.random.default_rng(seed)
    days = [d for d in trading_days() if d not in skip]
    close = start_price
    lines = ["Date,Open,High,Low,Close,Adj Close,Volume"]
    for i, d in enumerate(days):
        if last_row is not None and i == len(days) - 1:
            lines.append(last_row)
            break
        open_ = close * (1 + rng.normal(0, vol / 3))
        close = close * np.exp(rng.normal(0.0002, vol))
        high = max(open_, close) * (1 + abs(rng.normal(0, vol / 2)))
        low = min(open_, close) * (1 - abs(rng.normal(0, vol / 2)))
        volume = int(rng.integers(100_000, 5_000_000))
        if d in null_dates:
            lines.append(f"{d.isoformat()},null,null,null,null,null,null")
            continue
        lines.append(f"{d.isoformat()},{open_:.6f},{high:.6f},{low:.6f},{close:.6f},{close:.6f},{volume}")
    (OUT / f"{name}.csv").write_text("\n".join(lines) + "\n")


def write_cases():
    days = []
    d = dt.date(2020, 1, 22)
    while d <= END:
        days.append(d)
        d += dt.timedelta(days=1)
    header = "Province/State,Country/Region,Lat,Long," + ",".join(f"{x.month}/{x.day}/{x.year % 100}" for x in days)
    rows = []
    regions = [("Hubei", "China", 30.9756, 112.2707, 444, 0.06, 0),
               ("", "Italy", 41.8719, 12.5674, 0, 0.22, 9),
               ("", '"Korea, South"', 35.9078, 127.7669, 1, 0.12, 0)]
    rng = np.random.default_rng(11)
    for prov, country, lat, lon, base, growth, delay in regions:
        total = base
        values = []
        for i, _ in enumerate(days):
            if i >= delay:
                total = int(total + max(0, round(max(total, 10) * growth * rng.uniform(0.5, 1.5))))
            values.append(total)
        rows.append(f"{prov},{country},{lat},{lon}," + ",".join(str(v) for v in values))
    (OUT / "time_series_covid19_confirmed_global.csv").write_text("\n".join([header] + rows) + "\n")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    write_ohlcv("crude_oil", 49.5, 0.022, 1, skip={dt.date(2019, 11, 29)},
                last_row="2020-04-07,26.08,26.95,23.61,23.63,23.63,1109000")
    write_ohlcv("dji", 23300.0, 0.011, 2, null_dates={dt.date(2019, 6, 14)})
    write_ohlcv("sp500", 2510.0, 0.012, 3)
    write_ohlcv("nasdaq", 6665.0, 0.014, 4, skip={dt.date(2019, 12, 24)})
    write_cases()
