"""Load daily bars, compute a few indicators in batch, then replay them as a stream.

    python demos/indicators_demo.py
"""

import math
from pathlib import Path

from stocksignals.indicators import StreamState, compute_all, stream_update
from stocksignals.marketdata import compute_returns, load_prices

PRICES = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "minicorpus" / "prices.csv"
SPECS = ["ma:window=5", "ema:window=5", "rsi:window=14", "bb_upper:window=20,k=2", "macd"]


def main():
    bars = load_prices(PRICES)["MSFT"]
    returns = compute_returns(bars)
    print(f"{len(bars)} MSFT bars, first return {returns.values[0]:+.4%} on {returns.dates[0]}")

    table = compute_all(SPECS, bars)
    print(table.to_csv().splitlines()[-1])

    # the streaming path sees one bar at a time and agrees with the batch column
    state = StreamState("rsi:window=14")
    for bar in bars:
        state, value = stream_update(state, bar)
    batch = table.columns["rsi(window=14)"].values[-1]
    print(f"last RSI: stream {value:.6f}, batch {batch:.6f}, equal={math.isclose(value, batch, abs_tol=1e-9)}")


if __name__ == "__main__":
    main()
