"""Map free-text article keywords to tickers.

    python demos/keymatch_demo.py
"""

from stocksignals.keymatch import TickerProfile, best_match

PROFILES = [
    TickerProfile("MSFT", ("Microsoft", "Microsoft Corporation")),
    TickerProfile("GS", ("Goldman Sachs", "Goldman Sachs Group")),
    TickerProfile("DJIA", ("Dow Jones", "Dow Jones Industrial Average")),
]


def main():
    for keywords in (["Microsoft Corp"], ["Goldmann Sachs"], ["dow jones"], ["weather report"]):
        m = best_match(keywords, PROFILES)
        if m is None:
            print(f"{keywords!s:<22} -> no ticker")
        else:
            print(f"{keywords!s:<22} -> {m.ticker:<5} via {m.alias!r} (cos={m.cosine:.3f}, edit={m.edit})")


if __name__ == "__main__":
    main()
