"""Seeded Monte Carlo experiments: sample, solve exactly, compare to theory.

Each (n, p) cell draws `trials` graphs, computes the exact maximum induced
forest and tree sizes, and records how the forest size sits relative to the
two predicted concentration points. Per-trial seeds are a documented hash of
(base_seed, n, p-string, trial index), so any single graph can be rebuilt
by external tools. Reruns of the same config produce byte-identical records
apart from the timestamp header line.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from forestkit.graph import GnpParams, component_count, is_induced_forest, is_induced_tree, sample_gnp
from forestkit.moments import concentration_points
from forestkit.solver import DEFAULT_BUDGET, solve_max

CSV_COLUMNS = ("n", "p", "trial_seed", "F_n", "T_n", "gap", "k_low", "k_high", "in_window", "solver_status")

# exploratory desk-scale thresholds; the theory only speaks asymptotically
TOP2_MASS_TARGET = 0.9
GAP_LE_1_TARGET = 0.95


class HarnessError(RuntimeError):
    """Configuration problems or a cell that could not be completed."""


class CellAborted(HarnessError):
    """A trial came back incomplete; the whole cell is discarded loudly
    rather than biasing the distribution toward easy instances."""


# -- seed mixing ---------------------------------------------------------------


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def _fnv1a(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def trial_seed(base_seed: int, n: int, p_str: str, trial: int) -> int:
    """64-bit per-trial seed: splitmix64 finalizer over an FNV-1a hash of
    the string "<base_seed>:<n>:<p_str>:<trial>"."""
    return _splitmix64(_fnv1a(f"{base_seed}:{n}:{p_str}:{trial}".encode()))


# -- config and records ---------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    n_list: Tuple[int, ...]
    p_list: Tuple[str, ...]  # decimal strings, kept verbatim for output stability
    eps: float = 0.0
    trials: int = 1
    base_seed: int = 0
    node_budget: int = DEFAULT_BUDGET
    output: str = "records.csv"

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise HarnessError(f"trials must be >= 1, got {self.trials}")
        if not self.n_list or not self.p_list:
            raise HarnessError("n_list and p_list must be nonempty")
        for s in self.p_list:
            p = float(s)
            if not (0 < p < 1):
                raise HarnessError(f"p must be in (0, 1), got {s}")


@dataclass(frozen=True)
class TrialRecord:
    n: int
    p: str
    trial_seed: int
    F_n: int
    T_n: int
    gap: int
    k_low: int
    k_high: int
    in_window: bool
    solver_status: str

    def csv_row(self) -> str:
        return ",".join(
            str(x) for x in (
                self.n, self.p, self.trial_seed, self.F_n, self.T_n, self.gap,
                self.k_low, self.k_high, int(self.in_window), self.solver_status,
            )
        )


@dataclass(frozen=True)
class CellSummary:
    n: int
    p: str
    trials: int
    f_distribution: Dict[int, int]
    top2_mass: float
    mean_gap: float
    gap_le_1_fraction: float
    in_window_fraction: float
    flags: Tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "trials": self.trials,
            "f_distribution": {str(k): v for k, v in sorted(self.f_distribution.items())},
            "top2_mass": self.top2_mass,
            "mean_gap": self.mean_gap,
            "gap_le_1_fraction": self.gap_le_1_fraction,
            "in_window_fraction": self.in_window_fraction,
            "flags": list(self.flags),
        }


# -- running --------------------------------------------------------------------


def run_trial(n: int, p_str: str, eps: float, seed: int, node_budget: int, verify: bool = False) -> TrialRecord:
    p = float(p_str)
    g = sample_gnp(GnpParams(n, p, seed))
    forest = solve_max("forest", g, budget=node_budget)
    tree = solve_max("tree", g, budget=node_budget)
    status = "ok" if forest.complete and tree.complete else "incomplete"
    if verify and status == "ok":
        if not is_induced_forest(g, forest.witness) or forest.witness.bit_count() != forest.size:
            raise HarnessError(f"forest witness failed re-validation (n={n}, seed={seed})")
        if not is_induced_tree(g, tree.witness) or tree.witness.bit_count() != tree.size:
            raise HarnessError(f"tree witness failed re-validation (n={n}, seed={seed})")
    k_low, k_high = concentration_points(n, p, eps)
    return TrialRecord(
        n=n,
        p=p_str,
        trial_seed=seed,
        F_n=forest.size,
        T_n=tree.size,
        gap=forest.size - tree.size,
        k_low=k_low,
        k_high=k_high,
        in_window=forest.size in (k_low, k_high),
        solver_status=status,
    )


def run_experiment(
    cfg: ExperimentConfig,
    verify: bool = False,
    progress=None,
) -> Tuple[List[CellSummary], List[TrialRecord]]:
    """Run all cells; write records CSV and a JSON summary next to it."""
    records: List[TrialRecord] = []
    summaries: List[CellSummary] = []
    for n in cfg.n_list:
        for p_str in cfg.p_list:
            cell: List[TrialRecord] = []
            for t in range(cfg.trials):
                seed = trial_seed(cfg.base_seed, n, p_str, t)
                rec = run_trial(n, p_str, cfg.eps, seed, cfg.node_budget, verify=verify)
                if rec.solver_status != "ok":
                    raise CellAborted(
                        f"cell (n={n}, p={p_str}) trial {t} exhausted the node budget "
                        f"({cfg.node_budget}); raise node_budget and rerun"
                    )
                if rec.F_n < rec.T_n:
                    raise HarnessError(f"F_n < T_n at (n={n}, p={p_str}, trial={t}); solver bug")
                cell.append(rec)
                if progress is not None:
                    progress(n, p_str, t, cfg.trials)
            records.extend(cell)
            summaries.append(summarize_cell(cell))
    _write_records(cfg.output, records)
    _write_summary(_summary_path(cfg.output), summaries)
    return summaries, records


def summarize_cell(records: Sequence[TrialRecord]) -> CellSummary:
    if not records:
        raise HarnessError("cannot summarize an empty cell")
    n, p = records[0].n, records[0].p
    dist: Dict[int, int] = {}
    for r in records:
        dist[r.F_n] = dist.get(r.F_n, 0) + 1
    total = len(records)
    top2 = sum(sorted(dist.values(), reverse=True)[:2]) / total
    mean_gap = sum(r.gap for r in records) / total
    gap_le_1 = sum(1 for r in records if r.gap <= 1) / total
    in_win = sum(1 for r in records if r.in_window) / total
    flags = []
    if top2 < TOP2_MASS_TARGET:
        flags.append(f"top2_mass {top2:.3f} below exploratory target {TOP2_MASS_TARGET}")
    if gap_le_1 < GAP_LE_1_TARGET:
        flags.append(f"gap_le_1 fraction {gap_le_1:.3f} below exploratory target {GAP_LE_1_TARGET}")
    return CellSummary(
        n=n, p=p, trials=total, f_distribution=dist, top2_mass=top2,
        mean_gap=mean_gap, gap_le_1_fraction=gap_le_1,
        in_window_fraction=in_win, flags=tuple(flags),
    )


def summarize(records: Sequence[TrialRecord]) -> List[CellSummary]:
    cells: Dict[Tuple[int, str], List[TrialRecord]] = {}
    for r in records:
        cells.setdefault((r.n, r.p), []).append(r)
    return [summarize_cell(rs) for _, rs in sorted(cells.items())]


def sweep_epsilon(records: Sequence[TrialRecord], eps_grid: Sequence[float]) -> List[dict]:
    """Recompute the window fractions for each eps without re-solving."""
    rows: List[dict] = []
    cells: Dict[Tuple[int, str], List[TrialRecord]] = {}
    for r in records:
        cells.setdefault((r.n, r.p), []).append(r)
    for (n, p_str), rs in sorted(cells.items()):
        for eps in eps_grid:
            k_low, k_high = concentration_points(n, float(p_str), eps)
            frac = sum(1 for r in rs if r.F_n in (k_low, k_high)) / len(rs)
            rows.append({
                "n": n, "p": p_str, "eps": eps,
                "k_low": k_low, "k_high": k_high,
                "in_window_fraction": frac,
            })
    return rows


# -- persistence ------------------------------------------------------------------


def _summary_path(csv_path: str) -> str:
    base, _ext = os.path.splitext(csv_path)
    return base + ".summary.json"


def _write_records(path: str, records: Sequence[TrialRecord]) -> None:
    """Atomic write: temp file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(f"# forestkit records generated {datetime.now(timezone.utc).isoformat()}\n")
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for r in records:
                fh.write(r.csv_row() + "\n")
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _write_summary(path: str, summaries: Sequence[CellSummary]) -> None:
    with open(path, "w") as fh:
        json.dump([s.as_dict() for s in summaries], fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_records(path: str) -> List[TrialRecord]:
    records: List[TrialRecord] = []
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    body = [ln for ln in lines if not ln.startswith("#")]
    if not body or body[0] != ",".join(CSV_COLUMNS):
        raise HarnessError(f"{path} is not a forestkit records file")
    for ln in body[1:]:
        parts = ln.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise HarnessError(f"malformed record line: {ln!r}")
        records.append(TrialRecord(
            n=int(parts[0]), p=parts[1], trial_seed=int(parts[2]),
            F_n=int(parts[3]), T_n=int(parts[4]), gap=int(parts[5]),
            k_low=int(parts[6]), k_high=int(parts[7]),
            in_window=bool(int(parts[8])), solver_status=parts[9],
        ))
    return records


def records_body(path: str) -> str:
    """File contents with the timestamp header stripped, for byte comparisons."""
    with open(path) as fh:
        return "".join(ln for ln in fh if not ln.startswith("#"))


# -- config file -------------------------------------------------------------------
#
# The config is TOML; only the flat subset needed by ExperimentConfig is
# understood (key = value with strings, numbers, booleans and arrays), since
# no TOML parser ships with Python 3.10 and the package mirror carries none.


def _parse_toml_value(raw: str, path: str, key: str):
    raw = raw.strip()
    if raw.startswith("[") and raw.endswith("]"):
        inner = raw[1:-1].strip()
        if not inner:
            return []
        return [_parse_toml_value(item, path, key) for item in _split_toml_array(inner)]
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    if raw in ("true", "false"):
        return raw == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise HarnessError(f"{path}: cannot parse value {raw!r} for key {key!r}")


def _split_toml_array(inner: str) -> List[str]:
    items, depth, quote, cur = [], 0, False, []
    for ch in inner:
        if ch == '"':
            quote = not quote
        if not quote:
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            elif ch == "," and depth == 0:
                items.append("".join(cur))
                cur = []
                continue
        cur.append(ch)
    if "".join(cur).strip():
        items.append("".join(cur))
    return items


def load_config(path: str) -> ExperimentConfig:
    values: Dict[str, object] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            out, quote = [], False
            for ch in raw:
                if ch == '"':
                    quote = not quote
                if ch == "#" and not quote:
                    break
                out.append(ch)
            line = "".join(out).strip()
            if not line:
                continue
            if line.startswith("["):
                raise HarnessError(f"{path}:{lineno}: tables are not part of the config schema")
            if "=" not in line:
                raise HarnessError(f"{path}:{lineno}: expected key = value")
            key, raw_val = line.split("=", 1)
            values[key.strip()] = _parse_toml_value(raw_val, path, key.strip())
    return config_from_dict(values, path)


def config_from_dict(values: Dict[str, object], source: str = "<dict>") -> ExperimentConfig:
    known = {"n_list", "p_list", "eps", "trials", "base_seed", "node_budget", "output"}
    unknown = set(values) - known
    if unknown:
        raise HarnessError(f"{source}: unknown config keys {sorted(unknown)}")
    missing = {"n_list", "p_list"} - set(values)
    if missing:
        raise HarnessError(f"{source}: missing required keys {sorted(missing)}")
    p_list = values["p_list"]
    if not isinstance(p_list, list):
        raise HarnessError(f"{source}: p_list must be an array")
    p_strs = tuple(p if isinstance(p, str) else repr(float(p)) for p in p_list)
    return ExperimentConfig(
        n_list=tuple(int(n) for n in values["n_list"]),  # type: ignore[union-attr]
        p_list=p_strs,
        eps=float(values.get("eps", 0.0)),  # type: ignore[arg-type]
        trials=int(values.get("trials", 1)),  # type: ignore[arg-type]
        base_seed=int(values.get("base_seed", 0)),  # type: ignore[arg-type]
        node_budget=int(values.get("node_budget", DEFAULT_BUDGET)),  # type: ignore[arg-type]
        output=str(values.get("output", "records.csv")),
    )
