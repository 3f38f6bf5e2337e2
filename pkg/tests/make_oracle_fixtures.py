"""Regenerate the frozen coordinate-oracle fixtures in tests/data.

    python tests/make_oracle_fixtures.py

Each record holds the generator settings and every oracle array, so the
tests can rebuild the point data without running the (slow) oracle.
"""

import json
import os
import sys
from dataclasses import asdict

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))
from geometry_oracle import RandomSubmersion, oracle  # noqa: E402

SHAPES = [(1, 2), (2, 2), (2, 3), (3, 2), (1, 3), (3, 3)]
PATH = os.path.join(os.path.dirname(__file__), "data", "oracle_fixtures.json")


def configs():
    out = []
    for seed in range(12):
        out.append(dict(seed=seed, warp=True, warp_f=True, warp_h=True, flat_fibre=False))
    for seed in range(12, 18):
        out.append(dict(seed=seed, warp=True, warp_f=True, warp_h=False, flat_fibre=False))
    for seed in range(18, 22):
        out.append(dict(seed=seed, warp=False, warp_f=False, warp_h=False, flat_fibre=False))
    for seed in range(22, 24):
        out.append(dict(seed=seed, warp=True, warp_f=True, warp_h=True, flat_fibre=True))
    for c in out:
        c["p"], c["b"] = SHAPES[c["seed"] % len(SHAPES)]
    return out


def record(cfg):
    o = oracle(RandomSubmersion(**cfg))
    arrays = {k: (np.asarray(v).tolist() if v is not None else None) for k, v in asdict(o).items()}
    return {"config": cfg, "oracle": arrays}


def main(limit=None):
    recs = [record(c) for c in configs()[:limit]]
    with open(PATH, "w") as fh:
        json.dump(recs, fh)


if __name__ == "__main__":
    main()
