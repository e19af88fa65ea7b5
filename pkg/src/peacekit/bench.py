"""Config-driven sweeps over graph families, colourers and seeds.

A config is a TOML file::

    seed = 7                 # experiment seed
    out_dir = "sweep-out"    # CSV, JSON and colouring files go here

    [[cells]]
    family = "random_regular"   # complete | cycle | path | star | petersen
                                # | random_regular | adversarial | file
    n = 200
    delta = 16
    algorithm = "oneshot"       # oneshot | greedy | nibble | zcolour | oracle
    params = { mu = 0.5 }
    seeds = [0, 1, 2]           # or an integer count

Recognised ``params`` keys: greedy ``palette``; oneshot ``mu``, ``palette``,
``max_resample_rounds``; nibble ``b_const``, ``policy``, ``c_prime``;
zcolour ``epsilon``, ``max_rounds``, ``colour_rounds``; oracle ``c``.
The ``file`` family reads ``path`` instead of ``n``/``delta``.

Every (cell, seed) pair becomes one row. The graph seed is
``split_seed(experiment_seed, seed)`` so algorithms given the same family,
size and seed see the same graph; the algorithm seed is
``split_seed(experiment_seed, row_index)``.
"""
from __future__ import annotations

import csv
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .graph import (
    Graph,
    adversarial_bipartite,
    cache_dir,
    complete_graph,
    cycle_graph,
    load_graph,
    max_codegree,
    path_graph,
    petersen_graph,
    random_regular,
    save_graph,
    star_graph,
)
from .peace import PartialColouring, greedy_complete, load_colouring, peace_report, save_colouring
from .rng import split_seed

log = logging.getLogger(__name__)

__all__ = ["COLUMNS", "ConfigError", "Cell", "ExperimentConfig", "load_config", "build_graph", "run_cell", "run_experiment"]

COLUMNS = (
    "family",
    "n",
    "delta",
    "codegree_max",
    "algorithm",
    "params",
    "seed",
    "colours_used",
    "peacefulness",
    "unique_mean",
    "runtime_ms",
    "status",
)

FAMILIES = ("complete", "cycle", "path", "star", "petersen", "random_regular", "adversarial", "file")
ALGORITHMS = ("oneshot", "greedy", "nibble", "zcolour", "oracle")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    index: int
    family: str
    n: int | None
    delta: int | None
    algorithm: str
    params: dict
    seed: int
    path: str | None = None

    @property
    def params_text(self) -> str:
        return json.dumps(self.params, sort_keys=True, separators=(",", ":"))

    def matches(self, row: dict) -> bool:
        """Whether a CSV row records this cell (sizes left out of the config
        match whatever the generated graph had)."""
        if (row["family"], row["algorithm"], row["params"], str(row["seed"])) != (
            self.family, self.algorithm, self.params_text, str(self.seed)
        ):
            return False
        if self.n is not None and row["n"] != str(self.n):
            return False
        return self.delta is None or row["delta"] == str(self.delta)


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    out_dir: Path
    cells: tuple[Cell, ...] = field(default_factory=tuple)


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"bad TOML: {exc}") from exc
    base = Path(path).resolve().parent
    return parse_config(raw, base)


def parse_config(raw: dict, base: Path = Path(".")) -> ExperimentConfig:
    unknown = set(raw) - {"seed", "out_dir", "cells"}
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    out_dir = Path(raw.get("out_dir", "sweep-out"))
    if not out_dir.is_absolute():
        out_dir = base / out_dir
    cells = []
    for j, c in enumerate(raw.get("cells", [])):
        allowed = {"family", "n", "delta", "algorithm", "params", "seeds", "path"}
        extra = set(c) - allowed
        if extra:
            raise ConfigError(f"cell {j}: unknown keys {sorted(extra)}")
        fam = c.get("family")
        alg = c.get("algorithm")
        if fam not in FAMILIES:
            raise ConfigError(f"cell {j}: family must be one of {FAMILIES}")
        if alg not in ALGORITHMS:
            raise ConfigError(f"cell {j}: algorithm must be one of {ALGORITHMS}")
        seeds = c.get("seeds", 1)
        seeds = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
        if not all(isinstance(s, int) for s in seeds):
            raise ConfigError(f"cell {j}: seeds must be integers")
        params = dict(c.get("params", {}))
        for s in seeds:
            cells.append(Cell(len(cells), fam, c.get("n"), c.get("delta"), alg, params, s, c.get("path")))
    return ExperimentConfig(seed, out_dir, tuple(cells))


def build_graph(cell: Cell, experiment_seed: int) -> Graph:
    """Generate (or load from the cache directory) the cell's graph."""
    fam, n, delta = cell.family, cell.n, cell.delta
    gseed = split_seed(experiment_seed, cell.seed)
    if fam == "file":
        if not cell.path:
            raise ConfigError("file family needs a path")
        return load_graph(cell.path)
    if fam == "complete":
        return complete_graph(n)
    if fam == "cycle":
        return cycle_graph(n)
    if fam == "path":
        return path_graph(n)
    if fam == "star":
        return star_graph(delta)
    if fam == "petersen":
        return petersen_graph()
    cdir = cache_dir()
    cached = None
    if cdir:
        cached = Path(cdir) / f"{fam}_{n}_{delta}_{gseed}.txt"
        if cached.exists():
            return load_graph(cached)
    if fam == "random_regular":
        g = random_regular(n, delta, seed=gseed)
    else:
        g, _ = adversarial_bipartite(delta, seed=gseed)
    if cached is not None:
        cached.parent.mkdir(parents=True, exist_ok=True)
        save_graph(g, cached)
    return g


def _colour(g: Graph, alg: str, params: dict, seed: int) -> PartialColouring:
    if alg == "greedy":
        return greedy_complete(g, PartialColouring.empty(g.n, params.get("palette", g.delta + 1))).colouring
    if alg == "oneshot":
        from .oneshot import OneShotParams, oneshot_colour

        p = OneShotParams(mu=params.get("mu", 0.5), seed=seed,
                          max_resample_rounds=params.get("max_resample_rounds", 10_000),
                          palette_size=params.get("palette"))
        return oneshot_colour(g, p)[0]
    if alg == "nibble":
        from .nibble import nibble_colour, postprocess_recolour

        f, _ = nibble_colour(g, b_const=params.get("b_const", 4.0), seed=seed, policy=params.get("policy", "monitor-only"))
        return postprocess_recolour(g, f, params.get("c_prime"))[0]
    if alg == "zcolour":
        from .zcolour import z_pipeline

        res = z_pipeline(g, params.get("epsilon", "1/8001"), seed=seed, max_rounds=params.get("max_rounds", 10_000),
                         colour_rounds=params.get("colour_rounds", 1000))
        return res.result.colouring
    if alg == "oracle":
        from .oracle import min_peacefulness_exact

        return min_peacefulness_exact(g, params.get("c", g.delta + 1))[1]
    raise ConfigError(f"unknown algorithm {alg}")


def run_cell(cell: Cell, experiment_seed: int, out_dir: Path) -> dict:
    """Run one row; failures become a status string, never an exception."""
    row = dict.fromkeys(COLUMNS, "")
    row.update(family=cell.family, algorithm=cell.algorithm, params=cell.params_text, seed=cell.seed)
    try:
        g = build_graph(cell, experiment_seed)
        row.update(n=g.n, delta=g.delta, codegree_max=max_codegree(g))
        t0 = time.perf_counter()
        f = _colour(g, cell.algorithm, cell.params, split_seed(experiment_seed, cell.index))
        row["runtime_ms"] = round(1000 * (time.perf_counter() - t0), 3)
        path = out_dir / "colourings" / f"cell_{cell.index:05d}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        save_colouring(f, path)
        # the report is computed from the persisted artifact
        f2 = load_colouring(path)
        rep = peace_report(g, f2)
        row.update(
            colours_used=f2.colours_used(),
            peacefulness=rep.peacefulness,
            unique_mean=round(float(rep.undisturbed.mean()) if g.n else 0.0, 6),
            status="ok" if f2.is_total else "partial",
        )
    except Exception as exc:  # recorded, the sweep carries on
        log.warning("cell %d failed: %s", cell.index, exc)
        row["status"] = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
    return row


def _read_rows(path: Path) -> list[dict]:
    if not path.exists():
        return []
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _find(cell: Cell, rows: list[dict]) -> dict | None:
    for r in rows:
        if cell.matches(r):
            return r
    return None


def run_experiment(config: ExperimentConfig, *, threads: int = 1) -> Path:
    """Run every row not already in ``results.csv`` and rewrite it ordered
    by row index, plus ``results.json``. Returns the CSV path."""
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "results.csv"
    previous = _read_rows(csv_path)
    found = {c.index: _find(c, previous) for c in config.cells}
    todo = [c for c in config.cells if found[c.index] is None]
    if todo:
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as ex:
                rows = list(ex.map(run_cell, todo, [config.seed] * len(todo), [out] * len(todo)))
        else:
            rows = [run_cell(c, config.seed, out) for c in todo]
        for c, r in zip(todo, rows):
            found[c.index] = {k: str(v) for k, v in r.items()}
    ordered = [found[c.index] for c in config.cells]
    if todo or not csv_path.exists():
        tmp = csv_path.with_suffix(".tmp")
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=COLUMNS)
            w.writeheader()
            for r in ordered:
                w.writerow({k: r.get(k, "") for k in COLUMNS})
        os.replace(tmp, csv_path)
        with open(out / "results.json", "w", encoding="utf-8") as fh:
            json.dump(ordered, fh, indent=1)
    return csv_path
