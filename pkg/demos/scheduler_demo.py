"""Polite pacing against a fake server: random gaps, rotating identities, capped concurrency.

    python demos/scheduler_demo.py
"""

import random
import time
from collections import Counter

from stocksignals.ingest import Identity, PoliteScheduler


def main():
    identities = [Identity(f"agent-{i}") for i in range(3)]
    sched = PoliteScheduler(0.05, 0.1, identities, max_concurrency=2, rng=random.Random(0))

    def fake_server(i, identity):
        time.sleep(random.uniform(0.02, 0.12))
        return identity.user_agent

    used = sched.run(12, fake_server)
    starts = [d.started for d in sched.dispatches]
    gaps = [b - a for a, b in zip(starts, starts[1:])]
    print(f"gaps {min(gaps):.3f}..{max(gaps):.3f}s, identities {dict(Counter(used))}, "
          f"peak in flight {sched.max_inflight}")


if __name__ == "__main__":
    main()
