"""Regenerate oracle_small.json: winnability of every connected graph with
at most 4 vertices at 2 and 3 colors, decided by the enumeration oracle only.

    python3 tests/fixtures/make_oracle_small.py
"""

import json
from pathlib import Path

from hatters.game import GameSpec
from hatters.graphcore import small_graphs
from hatters.solver import naive_winnable

rows = []
for g in small_graphs(4):
    if not g.is_connected():
        continue
    for k in (2, 3):
        rows.append({"n": g.n, "edges": [list(e) for e in g.edges()], "k": k,
                     "winnable": naive_winnable(GameSpec.uniform(g, k))})

out = Path(__file__).with_name("oracle_small.json")
out.write_text(json.dumps(rows, indent=1) + "\n")
print(f"wrote {len(rows)} cases to {out}")
