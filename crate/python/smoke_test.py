"""Smoke test for the `rqa` extension module.

Build and install first, e.g.

    cd crates/python && maturin build --release -o dist && pip install dist/*.whl

then run `python python/smoke_test.py`.
"""

import math
import os
import random
import tempfile

import rqa


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAILED: {what}")
    print(f"ok  {what}")


def main():
    # Five-point fixture on raw values.
    rp = rqa.RecurrencePlot.from_series([0.0, 0.05, 1.0, 0.05, 0.0])
    rows = ["".join("1" if b else "0" for b in row) for row in rp.to_list()]
    check(rows == ["11011", "11011", "00100", "11011", "11011"], "fixture plot")
    m = rp.measures()
    check(m["rr"] == 0.68 and m["det"] == 1 / 3 and m["lam"] == 16 / 17, "fixture measures")
    check(m["tt"] == 2.0 and m["div"] == 0.5, "fixture TT and DIV")

    ident = rqa.RecurrencePlot.from_series([0.0, 10.0, 20.0, 30.0])
    check(ident.measures()["div"] is None, "undefined measures are None")

    z = rqa.normalize([1.0, 2.0, 3.0, 4.0])
    check(abs(sum(z)) < 1e-12, "normalize centres")
    check(rqa.delay_embed([1, 2, 3, 4, 5], 2, 2) == [[1, 3], [2, 4], [3, 5]], "delay embedding")

    sine = [math.sin(2 * math.pi * t / 67.3) for t in range(1, 2001)]
    ami = rqa.average_mutual_information(sine, 40)
    check(len(ami) == 41 and ami[0] > ami[10], "AMI curve")
    fnn = rqa.false_nearest_neighbors(sine, 17, 3)
    check(fnn[2] == 0.0, "FNN of a sine vanishes at m = 3")

    random.seed(3)
    price, prices = 100.0, []
    for _ in range(700):
        price *= math.exp(0.01 * random.gauss(0, 1))
        prices.append(price)

    cfg = rqa.EmbeddingConfig(epsilon=0.1, norm="max")
    full = rqa.RecurrencePlot.from_series(rqa.normalize(prices), cfg)
    lam = full.windowed(ws=250, measures=["lam", "tt"])
    check(len(lam["lam"]) == 451 and lam["lam"][0][0] == 249, "windowed geometry")

    mon = rqa.monitor_series(prices, lpr=500, ws=250)
    check(len(mon["lam"]) == 201 and mon["lam"][0][0] == 499, "monitor geometry")
    glob = rqa.monitor_series(prices, lpr=500, ws=250, scope="global")
    tail = {i: v for i, _, v in lam["lam"]}
    check(all(tail[i] == v for i, _, v in glob["lam"]), "global monitor equals windowed LAM")

    values = [0.95] * 500
    values += [0.95 - 0.2 * k / 300 for k in range(300)]
    values += [0.75 + 0.18 * k / 300 for k in range(300)]
    report = rqa.segment_lam(values, crisis_drop=0.1)
    check(abs(report["lam_drop_pct"] - 0.21) < 0.01, "segmentation drop")

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "p.csv")
        with open(path, "w") as f:
            f.write("date,close\n2020-01-02,100.5\n2020-01-03,101.0\n")
        dates, closes = rqa.load_csv(path)
        check(dates == ["2020-01-02", "2020-01-03"] and closes == [100.5, 101.0], "load_csv")

    try:
        rqa.normalize([1.0, 1.0, 1.0])
    except rqa.RqaError:
        check(True, "constant series raises RqaError")
    else:
        check(False, "constant series raises RqaError")

    pgm = full.raster()
    check(pgm.startswith(b"P5\n700 700\n255\n"), "raster header")
    print("all checks passed")


if __name__ == "__main__":
    main()
