#!/usr/bin/env python3
"""Write the bundled 25-category fixtures.

The embedding file stands in for sentence-encoder output: each category is a
unit vector drawn around a per-group center, so related names land close
together. Regenerate with:  python3 tools/make_category_data.py data/
"""
import sys
from pathlib import Path

import numpy as np

DIM = 512

# name, group, unit price, default aspect (footprint width / depth)
CATEGORIES = [
    ("bed", "sleep", 1500, 0.75),
    ("nightstand", "sleep", 150, 1.0),
    ("wardrobe", "sleep", 900, 2.0),
    ("dresser", "sleep", 600, 2.0),
    ("sofa", "seat", 1200, 2.5),
    ("armchair", "seat", 450, 1.0),
    ("dining_chair", "seat", 120, 1.0),
    ("office_chair", "seat", 250, 1.0),
    ("stool", "seat", 60, 1.0),
    ("dining_table", "table", 700, 1.5),
    ("coffee_table", "table", 250, 2.0),
    ("desk", "table", 400, 2.0),
    ("tv_stand", "table", 350, 3.0),
    ("bookshelf", "storage", 300, 3.0),
    ("cabinet", "storage", 400, 2.0),
    ("kitchen_counter", "kitchen", 1100, 4.0),
    ("stove", "kitchen", 900, 1.0),
    ("refrigerator", "kitchen", 1600, 1.0),
    ("sink", "kitchen", 300, 1.5),
    ("bathtub", "bath", 1400, 0.5),
    ("toilet", "bath", 350, 0.75),
    ("shower", "bath", 1000, 1.0),
    ("lamp", "decor", 80, 1.0),
    ("plant", "decor", 40, 1.0),
    ("piano", "decor", 3500, 2.0),
]


def main(out_dir: Path) -> None:
    rng = np.random.default_rng(20220701)
    groups = sorted({g for _, g, _, _ in CATEGORIES})
    centers = {g: rng.normal(size=DIM) for g in groups}
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "category_embeddings.csv", "w", encoding="utf-8") as f:
        f.write("name," + ",".join(f"e{i}" for i in range(DIM)) + "\n")
        for name, group, _, _ in CATEGORIES:
            v = 0.8 * centers[group] + rng.normal(size=DIM)
            v /= np.linalg.norm(v)
            f.write(name + "," + ",".join(f"{x:.6f}" for x in v) + "\n")
    with open(out_dir / "category_info.csv", "w", encoding="utf-8") as f:
        f.write("name,unit_price,default_aspect\n")
        for name, _, price, aspect in CATEGORIES:
            f.write(f"{name},{price},{aspect}\n")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "data"))
