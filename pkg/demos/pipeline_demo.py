"""Run the whole pipeline on a scratch copy of the mini-corpus and print the report.

Ingest replays recorded API responses, so nothing touches the network.

    python demos/pipeline_demo.py
"""

import shutil
import tempfile
from pathlib import Path

from stocksignals.cli import main as cli

MINICORPUS = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "minicorpus"


def main():
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp) / "minicorpus"
        shutil.copytree(MINICORPUS, root)
        cfg = str(root / "config.toml")
        for command in ("ingest", "sentiment", "emotion", "correlate"):
            cli([command, "--config", cfg])
        print()
        cli(["report", "--config", cfg])


if __name__ == "__main__":
    main()
