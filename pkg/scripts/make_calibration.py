"""Regenerate src/bouslp/data/calibration.json from the designated runs.

The calibrated constant of each trajectory check is its measured sup ratio
on the bundled reference verify run; the commutator constant comes from the
grid/pair sweep. Committed with the package so verification thresholds are
pinned, not re-fit per run.
"""

import json
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from bouslp.cli import _verify_one, bundled_reference_config_path  # noqa: E402
from bouslp.config import load_config  # noqa: E402
from bouslp.paraproduct import commutator_grid_suite  # noqa: E402

COMMUTATOR_GRIDS = (64, 128, 256)
COMMUTATOR_PAIRS = 50
COMMUTATOR_SEED = 2024


def main():
    config = load_config(bundled_reference_config_path())
    with tempfile.TemporaryDirectory() as tmp:
        import os

        os.environ["BOUSLP_OUTPUT_ROOT"] = tmp
        _, summary = _verify_one(config, "estimates.csv", "summary.json")
        os.environ.pop("BOUSLP_OUTPUT_ROOT")

    checks = {
        cid: entry["empirical_constant"]
        for cid, entry in summary["checks"].items()
    }

    suite = commutator_grid_suite(COMMUTATOR_GRIDS, COMMUTATOR_PAIRS, COMMUTATOR_SEED)
    checks["commutator_suite"] = suite["max_ratio"]

    payload = {
        "meta": {
            "reference_config_hash": config.config_hash(),
            "commutator": {
                "grids": list(COMMUTATOR_GRIDS),
                "pairs_per_grid": COMMUTATOR_PAIRS,
                "seed": COMMUTATOR_SEED,
                "per_grid": suite["per_grid"],
            },
        },
        "checks": checks,
    }
    out = REPO / "src" / "bouslp" / "data" / "calibration.json"
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")
    for cid, val in sorted(checks.items()):
        print(f"  {cid}: {val:.6g}")


if __name__ == "__main__":
    main()
