"""Ablation benchmark grid: datasets x thresholds x miner configurations.

A plan is a JSON object::

    {
      "datasets": [
        {"id": "toy", "db": "toy.db", "profits": "toy.prof"},
        {"id": "c8t4", "gen": {"num_sequences": 10000, "rng_seed": 7}}
      ],
      "deltas": ["0.05", "0.1"],
      "bounds": ["peu", "seu", "swu"],
      "las": [true, false],
      "ips": [true, false],
      "time_budget": 600
    }

File paths are relative to the plan file.  ``gen`` entries take any
``GenParams`` field.  Omitted grid axes default to the full grid.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

from .datagen import GenParams, generate
from .miner import Bound, MinerConfig, MiningTimeout, mine
from .model import ParseError, QSeqDatabase, load_database, parse_database, parse_profit_table

HEADER = ["dataset", "delta", "bound", "las", "ips", "ms", "candidates", "husps", "peak_entries"]
TIMEOUT = "-"


@dataclass
class BenchRow:
    dataset: str
    delta: str
    bound: str
    las: bool
    ips: bool
    elapsed_millis: float | None
    candidates: int | None
    husps: int | None
    peak_entries: int | None

    def cells(self) -> list[str]:
        def show(v):
            return TIMEOUT if v is None else str(v)

        ms = TIMEOUT if self.elapsed_millis is None else f"{self.elapsed_millis:.1f}"
        return [
            self.dataset,
            self.delta,
            self.bound,
            "1" if self.las else "0",
            "1" if self.ips else "0",
            ms,
            show(self.candidates),
            show(self.husps),
            show(self.peak_entries),
        ]


def parse_plan(text: str) -> dict:
    try:
        plan = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad plan: {exc}") from None
    if not isinstance(plan, dict):
        raise ParseError("plan must be a JSON object")
    for ds in plan.get("datasets", []):
        if "id" not in ds or not (("db" in ds and "profits" in ds) or "gen" in ds):
            raise ParseError(f"dataset entry needs 'id' and either db/profits or gen: {ds}")
    for b in plan.get("bounds", []):
        if b not in {m.value for m in Bound}:
            raise ParseError(f"unknown bound {b!r}")
    return plan


def load_dataset(entry: dict, base_dir: str = ".") -> QSeqDatabase:
    if "gen" in entry:
        db_text, prof_text = generate(GenParams(**entry["gen"]))
        return parse_database(db_text, parse_profit_table(prof_text))
    return load_database(os.path.join(base_dir, entry["db"]), os.path.join(base_dir, entry["profits"]))


def _cell(args) -> BenchRow:
    ds_id, db, delta, bound, las, ips, budget, max_len = args
    config = MinerConfig(
        min_util_ratio=delta, bound=bound, las=las, ips=ips, time_budget=budget, max_pattern_length=max_len
    )
    try:
        results, stats = mine(db, config)
    except MiningTimeout:
        return BenchRow(ds_id, delta, bound, las, ips, None, None, None, None)
    return BenchRow(
        ds_id, delta, bound, las, ips,
        stats.elapsed_millis, stats.candidates_generated, len(results), stats.peak_projected_entries,
    )


def bench(plan: dict, base_dir: str = ".", jobs: int = 1) -> list[BenchRow]:
    deltas = [str(d) for d in plan.get("deltas", [])]
    bounds = plan.get("bounds", [b.value for b in Bound][::-1])
    las_axis = plan.get("las", [True, False])
    ips_axis = plan.get("ips", [True, False])
    budget = plan.get("time_budget")
    max_len = plan.get("max_pattern_length")
    cells = []
    for entry in plan.get("datasets", []):
        db = load_dataset(entry, base_dir)
        for delta, bound, las, ips in product(deltas, bounds, las_axis, ips_axis):
            cells.append((entry["id"], db, delta, bound, bool(las), bool(ips), budget, max_len))
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_cell, cells))
    return [_cell(c) for c in cells]


def rows_to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for row in rows:
        writer.writerow(row.cells())
    return buf.getvalue()
