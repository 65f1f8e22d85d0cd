"""Command-line entry point: simulate, verify, predict, table, oracle.

Exit status: 0 on success, 1 when a verification claim fails, 2 for usage or
configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterator, List, Optional, Sequence

import numpy as np

from . import asymptotics as asy
from . import degdist, oracle, stats
from .simulate import FIXED, MODES, RANDOM_OUT, generate_replicate
from .weights import WeightLaw, law_from_dict, parse_law

SCHEMA_VERSION = 1
SEED_ENV = "WRTLAB_SEED"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

MEAN_SE_TOL = 3.0
TAIL_SE_TOL = 3.0
PMF_SE_TOL = 4.0
TV_TOL = 0.05
MAXIMIZER_CELLS = (1, 2, 3)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    law: WeightLaw
    n: int
    mode: str = FIXED
    replicates: int = 1
    seed: int = 0
    window: tuple = stats.DEFAULT_WINDOW
    out: Optional[str] = None
    parallel: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"n must be at least 1, got {self.n}")
        if self.replicates < 1:
            raise ConfigError(f"replicates must be at least 1, got {self.replicates}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("seed must be a non-negative 64-bit integer")
        if self.window[0] > self.window[1]:
            raise ConfigError(f"empty window {self.window}")
        if self.parallel < 1:
            raise ConfigError("parallel must be at least 1")


@dataclass
class RunRecord:
    law: dict
    n: int
    mode: str
    seed: int
    replicate_index: int
    max_degree: int
    num_maximizers: int
    num_edges: int
    census: Optional[dict]
    timestamp: str = ""
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        d = {
            "schemaVersion": self.schema_version,
            "law": self.law,
            "n": self.n,
            "mode": self.mode,
            "seed": self.seed,
            "replicateIndex": self.replicate_index,
            "maxDegree": self.max_degree,
            "numMaximizers": self.num_maximizers,
            "numEdges": self.num_edges,
            "census": self.census,
            "timestamp": self.timestamp,
        }
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        d = json.loads(line)
        version = d.get("schemaVersion")
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schemaVersion {version!r} (expected {SCHEMA_VERSION})")
        return cls(
            law=d["law"],
            n=int(d["n"]),
            mode=d["mode"],
            seed=int(d["seed"]),
            replicate_index=int(d["replicateIndex"]),
            max_degree=int(d["maxDegree"]),
            num_maximizers=int(d["numMaximizers"]),
            num_edges=int(d["numEdges"]),
            census=d.get("census"),
            timestamp=d.get("timestamp", ""),
        )

    def degree_census(self) -> Optional[stats.DegreeCensus]:
        return None if self.census is None else stats.DegreeCensus.from_summary(self.census)


def simulate_record(law: WeightLaw, n: int, mode: str, seed: int, r: int, window) -> RunRecord:
    tree = generate_replicate(law, n, mode, seed, r)
    try:
        cen = stats.census(tree, asy.centering_for(law), window).summary()
    except ValueError:
        # no centering for this law or n too small for its log-log terms
        cen = None
    return RunRecord(
        law=law.to_dict(),
        n=n,
        mode=mode,
        seed=seed,
        replicate_index=r,
        max_degree=tree.max_degree,
        num_maximizers=int(np.count_nonzero(tree.in_degrees == tree.max_degree)),
        num_edges=tree.num_edges,
        census=cen,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


def _worker(args):
    return simulate_record(*args)


def iter_records(cfg: ExperimentConfig, start: int = 0) -> Iterator[RunRecord]:
    """Records for replicates start..R-1 in index order, whatever the worker count."""
    jobs = ((cfg.law, cfg.n, cfg.mode, cfg.seed, r, cfg.window) for r in range(start, cfg.replicates))
    if cfg.parallel == 1:
        for job in jobs:
            yield _worker(job)
        return
    with ProcessPoolExecutor(max_workers=cfg.parallel) as ex:
        yield from ex.map(_worker, jobs, chunksize=8)


def _existing_records(path: str, cfg: ExperimentConfig) -> int:
    """Number of complete, matching records already in ``path``; trims a torn last line."""
    if not os.path.exists(path):
        return 0
    with open(path, "rb") as fh:
        data = fh.read()
    if data and not data.endswith(b"\n"):
        cut = data.rfind(b"\n") + 1
        with open(path, "r+b") as fh:
            fh.truncate(cut)
        data = data[:cut]
    count = 0
    for line in data.decode().splitlines():
        if not line.strip():
            continue
        rec = RunRecord.from_json(line)
        if (rec.law, rec.n, rec.mode, rec.seed) != (cfg.law.to_dict(), cfg.n, cfg.mode, cfg.seed):
            raise ConfigError(f"{path}: existing records belong to a different configuration")
        if rec.replicate_index != count:
            raise ConfigError(f"{path}: replicate indices are not contiguous at line {count + 1}")
        count += 1
    return count


def run_simulate(cfg: ExperimentConfig, progress: bool = False) -> int:
    """Write R records as JSONL; an existing file is resumed where it stopped."""
    if cfg.out is None:
        for rec in iter_records(cfg):
            sys.stdout.write(rec.to_json() + "\n")
        return cfg.replicates
    start = _existing_records(cfg.out, cfg)
    written = 0
    try:
        with open(cfg.out, "a") as fh:
            for rec in iter_records(cfg, start):
                fh.write(rec.to_json() + "\n")
                fh.flush()
                written += 1
                if progress:
                    print(f"\r{start + written}/{cfg.replicates}", end="", file=sys.stderr)
    except OSError as exc:
        raise OSError(f"cannot write records to {cfg.out}: {exc.strerror}") from exc
    if progress:
        print(file=sys.stderr)
    return written


def load_records(path: str) -> List[RunRecord]:
    try:
        with open(path) as fh:
            lines = [ln for ln in fh if ln.strip()]
    except OSError as exc:
        raise OSError(f"cannot read records from {path}: {exc.strerror}") from exc
    records = [RunRecord.from_json(ln) for ln in lines]
    if not records:
        raise ConfigError(f"{path}: empty record set")
    head = records[0]
    for rec in records:
        if (rec.law, rec.n, rec.mode) != (head.law, head.n, head.mode):
            raise ConfigError(f"{path}: records mix laws, sizes or modes")
    return records


@dataclass
class Claim:
    name: str
    statistic: float
    prediction: float
    tolerance: float
    passed: bool
    hard: bool = True
    detail: str = ""


@dataclass
class VerifyReport:
    law: dict
    n: int
    mode: str
    replicates: int
    eps_n: Optional[float]
    claims: List[Claim] = field(default_factory=list)

    @property
    def hard_failures(self) -> List[Claim]:
        return [c for c in self.claims if c.hard and not c.passed]

    def to_dict(self) -> dict:
        return {
            "law": self.law,
            "n": self.n,
            "mode": self.mode,
            "replicates": self.replicates,
            "eps_n": self.eps_n,
            "passed": not self.hard_failures,
            "claims": [c.__dict__ for c in self.claims],
        }

    def table(self) -> str:
        lines = [f"{'claim':<26}{'statistic':>12}{'prediction':>12}{'tolerance':>11}  result"]
        for c in self.claims:
            verdict = "pass" if c.passed else ("FAIL" if c.hard else "fail (soft)")
            lines.append(
                f"{c.name:<26}{c.statistic:>12.5g}{c.prediction:>12.5g}{c.tolerance:>11.4g}  {verdict}"
                + (f"  {c.detail}" if c.detail else "")
            )
        return "\n".join(lines)


def _mean_claim(name, values, pred, hard, model_var=None):
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    if model_var is not None:
        # a run with no spread (few replicates) must not get zero tolerance
        se = max(se, math.sqrt(model_var / values.size))
    stat = float(values.mean())
    return Claim(name, stat, pred, MEAN_SE_TOL * se, abs(stat - pred) <= MEAN_SE_TOL * se, hard, f"se={se:.3g}")


def _bernoulli_se(p_hat: float, p_pred: float, R: int) -> float:
    # sample-based, floored by the predicted Bernoulli spread
    sample = math.sqrt(p_hat * (1 - p_hat) / (R - 1)) if R > 1 else 0.0
    return max(sample, math.sqrt(p_pred * (1 - p_pred) / R))


def verify_records(records: Sequence[RunRecord], window=(0, 3)) -> VerifyReport:
    """Compare census records with the limit predictions of their law.

    Atom-law claims in fixed mode are hard; other laws and the random
    out-degree mode are reported as soft claims.
    """
    head = records[0]
    law = law_from_dict(head.law)
    cen = asy.centering_for(law)
    n = head.n
    censuses = [r.degree_census() for r in records]
    report = VerifyReport(head.law, n, head.mode, len(records), cen.eps_n(n) if n > 1 else None)
    hard = cen.case == asy.ATOM and head.mode == FIXED
    lo, hi = window
    if any(c is None for c in censuses):
        report.claims.append(Claim("census", float("nan"), float("nan"), 0.0, False, True, "missing census data"))
        return report
    clo = max(lo, censuses[0].window[0])
    chi = min(hi, censuses[0].window[1])
    if clo > chi:
        report.claims.append(Claim("window", float("nan"), float("nan"), 0.0, False, True, "no data in window"))
        return report
    R = len(records)
    for i in range(clo, chi + 1):
        m_i, m_geq = asy.bucket_means(cen, n, i)
        report.claims.append(_mean_claim(f"mean X_{i}", stats.bucket_samples(censuses, i), m_i, hard, m_i))
        report.claims.append(
            _mean_claim(f"mean X_>={i}", stats.bucket_samples(censuses, i, geq=True), m_geq, hard, m_geq)
        )
        if R >= stats.MIN_FIT_SAMPLES:
            fit = stats.poisson_fit(stats.bucket_samples(censuses, i), m_i)
            report.claims.append(
                Claim(f"TV X_{i} vs Poisson", fit.tv_distance, 0.0, TV_TOL, fit.tv_distance <= TV_TOL, hard,
                      f"chi2 p={fit.chi_sq_p_value:.3g}")
            )
    max_deg = np.array([r.max_degree for r in records])
    fc = censuses[0].floor_center
    for i in range(max(clo, 1), chi + 1):
        pred = asy.max_tail_prediction(cen, n, i)
        emp = float(np.mean(max_deg >= fc + i))
        se = _bernoulli_se(emp, pred, R)
        report.claims.append(
            Claim(f"P(max >= c+{i})", emp, pred, TAIL_SE_TOL * se, abs(emp - pred) <= TAIL_SE_TOL * se, hard)
        )
    counts = np.array([r.num_maximizers for r in records])
    for k in MAXIMIZER_CELLS:
        pred = asy.maximizer_count_pmf(cen, cen.eps_n(n), k)
        emp = float(np.mean(counts == k))
        se = _bernoulli_se(emp, pred, R)
        report.claims.append(
            Claim(f"P(#maximizers = {k})", emp, pred, PMF_SE_TOL * se, abs(emp - pred) <= PMF_SE_TOL * se, hard)
        )
    if head.mode == RANDOM_OUT:
        edges = np.array([r.num_edges for r in records], dtype=float)
        report.claims.append(_mean_claim("mean edge count", edges, n - 1.0, True))
    return report


def parse_window(text: str) -> tuple:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"window must look like iLo:iHi, got {text!r}") from exc
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty window {text!r}")
    return lo, hi


def parse_predictable(text: str):
    """A catalog law, or a prediction-only {"kind": "rav", ...} profile."""
    stripped = text.strip()
    if stripped.startswith("{"):
        d = json.loads(stripped)
        if d.get("kind") == "rav":
            return asy.RaVProfile(float(d["tau"]), float(d["c1"]), float(d["theta"]), float(d.get("b", 0.0)))
    return parse_law(text)


def resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from exc


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror}") from exc


def cmd_simulate(args) -> int:
    cfg = ExperimentConfig(
        law=parse_law(args.law),
        n=args.n,
        mode=args.mode,
        replicates=args.replicates,
        seed=resolve_seed(args.seed),
        window=args.window or stats.DEFAULT_WINDOW,
        out=args.out,
        parallel=args.parallel or os.cpu_count() or 1,
    )
    run_simulate(cfg, progress=args.out is not None and sys.stderr.isatty())
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify_records(load_records(args.records), args.window or (0, 3))
    payload = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out is None:
        print(report.table(), file=sys.stderr)
        sys.stdout.write(payload)
    else:
        print(report.table())
        _write_output(payload, args.out)
    return EXIT_FAIL if report.hard_failures else EXIT_OK


def cmd_predict(args) -> int:
    law = parse_predictable(args.law)
    _write_output(json.dumps(asy.prediction_summary(law, args.n), indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_table(args) -> int:
    law = parse_law(args.law)
    k_lo, k_hi = args.k
    rows = degdist.degree_table(law, range(k_lo, k_hi + 1), args.xi)

    def dump(fh):
        w = csv.DictWriter(fh, fieldnames=list(degdist.TABLE_COLUMNS), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)

    if args.out is None:
        dump(sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            dump(fh)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.weights is not None:
        w = [float(v) for v in args.weights.split(",")]
        if args.targets is not None:
            targets = [int(v) for v in args.targets.split(",")]
            text = oracle.enumerate_exact(w, targets).to_json()
        else:
            vertex = 0 if args.vertex is None else int(args.vertex)
            text = json.dumps({"vertex": vertex, "pmf": oracle.poisson_binomial_marginal(w, vertex).tolist()})
    else:
        if args.law is None or args.n is None:
            raise ConfigError("oracle needs --weights, or --law together with --n")
        vertex = args.vertex or "uniform"
        j = vertex if vertex == "uniform" else int(vertex)
        est = oracle.unconditional_degree_law(
            parse_law(args.law), args.n, j, args.replicates or oracle.MIN_WEIGHT_REPLICATES,
            resolve_seed(args.seed),
        )
        text = est.to_json()
    _write_output(text + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wrtlab", description="Weighted recursive tree experiments")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="generate trees and write census records (JSONL)")
    s.add_argument("--law", required=True, help="preset name or JSON law")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--mode", choices=MODES, default=FIXED)
    s.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV}, then 0")
    s.add_argument("--replicates", type=int, default=1)
    s.add_argument("--window", type=parse_window, default=None, help="census window iLo:iHi")
    s.add_argument("--out", default=None, help="JSONL path (resumed if it exists)")
    s.add_argument("--parallel", type=int, default=None, help="worker processes (default: all cores)")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="check records against limit predictions")
    v.add_argument("records")
    v.add_argument("--window", type=parse_window, default=None, help="buckets to test, default 0:3")
    v.add_argument("--out", default=None, help="JSON report path")
    v.set_defaults(func=cmd_verify)

    pr = sub.add_parser("predict", help="centering and limit constants as JSON")
    pr.add_argument("--law", required=True)
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--out", default=None)
    pr.set_defaults(func=cmd_predict)

    t = sub.add_parser("table", help="degree-distribution table as CSV")
    t.add_argument("--law", required=True)
    t.add_argument("--k", type=parse_window, default=(0, 10), help="k range kLo:kHi")
    t.add_argument("--xi", type=float, default=0.05)
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_table)

    o = sub.add_parser("oracle", help="exact small-n degree laws as JSON")
    o.add_argument("--weights", default=None, help="comma-separated fixed weights")
    o.add_argument("--targets", default=None, help="comma-separated vertices for the joint law")
    o.add_argument("--vertex", default=None, help="vertex index or 'uniform'")
    o.add_argument("--law", default=None)
    o.add_argument("--n", type=int, default=None)
    o.add_argument("--replicates", type=int, default=None)
    o.add_argument("--seed", type=int, default=None)
    o.add_argument("--out", default=None)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"wrtlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"wrtlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
