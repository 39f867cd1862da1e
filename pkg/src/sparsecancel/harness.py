"""
Monte-Carlo sweep runner.

Seeding
-------
Every random draw in a trial comes from a seed derived by hashing
``(master seed, sweep key, trial index)`` into a *trial seed*, then
``(trial seed, role code)`` into a per-role seed (see
:func:`~sparsecancel.signal.derive_seed`). The sweep key is the sweep point
index, or 0 for every point when ``paired_sweep`` is set so that all sweep
points see the same signals and channels (common random numbers). Role codes:

====  ================================
0     first UL signal ``s`` / ``s1``
1     second UL signal ``s2``
2     first chip channel ``h`` / ``h1``
3     second chip channel ``h2``
4     DL signal and noise of the frame
====  ================================

With ``channel_policy = "fixed"`` the channels are drawn from the master seed
alone (sweep key and trial index both 0). Rows therefore do not depend on
execution order or thread count.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import Optional

import numpy as np

from . import solvers
from .config import ScenarioConfig
from .dictionary import Model, build_dictionary
from .distortion import HD, distort, make_frame
from .errors import InvalidArgumentError, SparseCancelError
from .metrics import make_report, reconstruct
from .signal import derive_seed, fir_filter, generate_block

logger = logging.getLogger(__name__)

ROLE_S1, ROLE_S2, ROLE_H1, ROLE_H2, ROLE_FRAME = range(5)

CSV_HEADER = ("scenario", "solver", "J", "P_s_dbm", "trial", "original_dbm",
              "residual_dbm", "suppression_db", "seed")
AGG_HEADER = ("scenario", "solver", "J", "P_s_dbm", "metric", "value")


def random_channel(L: int, decay: float, seed: int) -> np.ndarray:
    """Exponentially decaying Rayleigh FIR taps with unit total energy."""
    if int(L) < 1:
        raise InvalidArgumentError(f"channel length must be positive, got {L}")
    if not 0.0 < decay <= 1.0:
        raise InvalidArgumentError(f"decay must lie in (0, 1], got {decay}")
    rng = np.random.default_rng(seed)
    g = (rng.standard_normal(L) + 1j * rng.standard_normal(L)) / np.sqrt(2.0)
    h = decay ** np.arange(L) * g
    return h / np.linalg.norm(h)


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    solver: str
    J: int
    P_s_dbm: float
    trial: int
    original_dbm: float
    residual_dbm: float
    suppression_db: float
    seed: int
    error: Optional[str] = None

    def csv_fields(self) -> list[str]:
        return [_fmt(v) for v in astuple(self)[: len(CSV_HEADER)]]


@dataclass(frozen=True)
class AggregateRow:
    scenario: str
    solver: str
    J: int
    P_s_dbm: float
    metric: str
    value: float

    def csv_fields(self) -> list[str]:
        return [_fmt(v) for v in astuple(self)]


def _fmt(v) -> str:
    # shortest round-trip repr keeps the CSV lossless and byte-stable
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def trial_seed(config: ScenarioConfig, sweep_index: int, trial_index: int) -> int:
    key = 0 if config.paired_sweep else sweep_index
    return derive_seed(config.seed, key, trial_index)


def _channel_seed(config: ScenarioConfig, tseed: int, role: int) -> int:
    if config.channel_policy == "fixed":
        return derive_seed(derive_seed(config.seed, 0, 0), role)
    return derive_seed(tseed, role)


def _solve(name: str, J: int, config, exact, frame, s1, s2):
    spec = config.spec
    if name == "sparse":
        D = exact
        v = solvers.omp_solve(D, frame.r, J).v_hat
    elif name == "full":
        D = exact
        v = solvers.lls_solve(D, frame.r).v_hat
    else:
        lengths = config.model_lengths if name == "prior" else J
        D = build_dictionary(Model(name), spec, s1, s2, lengths)
        v = solvers.lls_solve(D, frame.r).v_hat
    return reconstruct(D, v)


def run_trial(config: ScenarioConfig, sweep_index: int, trial_index: int) -> list[ResultRow]:
    """Simulate one received block and apply every configured canceller.

    Returns one row per solver, in configuration order. Solver or
    dictionary failures yield a row with NaN residual and the failure in
    ``error`` instead of raising.
    """
    P_s, _ = config.sweep_point(sweep_index)
    tseed = trial_seed(config, sweep_index, trial_index)
    spec = config.spec
    P = config.P

    s1 = generate_block(P, config.signal_kind, derive_seed(tseed, ROLE_S1))
    h1 = random_channel(config.true_lengths[0], config.decay, _channel_seed(config, tseed, ROLE_H1))
    if spec.kind == HD:
        s2 = None
        leaked = (fir_filter(s1, h1),)
    else:
        s2 = generate_block(P, config.signal_kind, derive_seed(tseed, ROLE_S2))
        h2 = random_channel(config.true_lengths[1], config.decay, _channel_seed(config, tseed, ROLE_H2))
        leaked = (fir_filter(s1, h1), fir_filter(s2, h2))

    frame = make_frame(
        distort(spec, *leaked), config.distortion_dbm, P_s, config.inr_db,
        derive_seed(tseed, ROLE_FRAME),
    )

    exact = None
    exact_error = None
    if any(s.name in ("sparse", "full") for s in config.solvers):
        try:
            exact = build_dictionary(Model.EXACT, spec, s1, s2, config.model_lengths)
        except SparseCancelError as exc:
            exact_error = exc

    rows = []
    for solver in config.solvers:
        J = config.solver_J(solver, sweep_index)
        try:
            if exact_error is not None and solver.name in ("sparse", "full"):
                raise exact_error
            p_hat = _solve(solver.name, J, config, exact, frame, s1, s2)
        except (SparseCancelError, np.linalg.LinAlgError) as exc:
            tag = f"{type(exc).__name__}: {exc}"
            logger.warning("trial %d/%d solver %s failed: %s", sweep_index, trial_index, solver.name, tag)
            original = frame.distortion_dbm
            rows.append(ResultRow(config.scenario, solver.name, J, P_s, trial_index,
                                  original, math.nan, math.nan, tseed, tag))
            continue
        rep = make_report(frame, p_hat, solver.name, J)
        rows.append(ResultRow(
            config.scenario, solver.name, J, P_s, trial_index,
            rep.original_distortion_dbm, rep.residual_distortion_dbm,
            rep.suppression_db, tseed,
        ))
    return rows


@dataclass
class SweepResult:
    rows: list[ResultRow]
    aggregates: list[AggregateRow]

    def csv_text(self) -> str:
        return _to_csv(CSV_HEADER, self.rows)

    def aggregate_csv_text(self) -> str:
        return _to_csv(AGG_HEADER, self.aggregates)

    def failures(self) -> list[ResultRow]:
        return [r for r in self.rows if r.error is not None]


def _to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()


def mean_power_dbm(values_dbm) -> float:
    """Mean of powers taken in linear units, returned in dBm."""
    lin = np.power(10.0, np.asarray(values_dbm, dtype=float) / 10.0)
    m = float(np.mean(lin))
    return 10.0 * math.log10(m) if m > 0 else -math.inf


def aggregate(config: ScenarioConfig, rows: list[ResultRow]) -> list[AggregateRow]:
    """Median and linear-mean residual power per sweep point and solver.

    Failed rows (NaN residual) are excluded; a group with no successful
    rows reports NaN.
    """
    n_solvers = len(config.solvers)
    out = []
    for point in range(len(config.sweep_values)):
        P_s, _ = config.sweep_point(point)
        for k, solver in enumerate(config.solvers):
            group = rows[point * config.trials * n_solvers + k::n_solvers][: config.trials]
            values = [r.residual_dbm for r in group if not math.isnan(r.residual_dbm)]
            J = config.solver_J(solver, point)
            median = float(np.median(values)) if values else math.nan
            mean = mean_power_dbm(values) if values else math.nan
            out.append(AggregateRow(config.scenario, solver.name, J, P_s, "median_residual_dbm", median))
            out.append(AggregateRow(config.scenario, solver.name, J, P_s, "mean_residual_dbm", mean))
    return out


def run_sweep(config: ScenarioConfig, out=None, threads: int = 1) -> SweepResult:
    """Run every (sweep point, trial) pair and collect sorted rows.

    When ``out`` is given, the rows are written there and the aggregates to
    ``<out>.agg.csv``. Both files are opened before any simulation starts so
    an unwritable path fails fast with :class:`OSError`.
    """
    handles = None
    if out is not None:
        out = str(out)
        handles = (open(out, "w", newline=""), open(out + ".agg.csv", "w", newline=""))
    try:
        jobs = [(i, t) for i in range(len(config.sweep_values)) for t in range(config.trials)]
        logger.info("running %d trials x %d solvers", len(jobs), len(config.solvers))
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                chunks = list(pool.map(lambda job: run_trial(config, *job), jobs))
        else:
            chunks = [run_trial(config, *job) for job in jobs]
        # pool.map preserves job order; rows are already (sweep, trial, solver) sorted
        rows = [row for chunk in chunks for row in chunk]
        result = SweepResult(rows, aggregate(config, rows))
        if handles is not None:
            handles[0].write(result.csv_text())
            handles[1].write(result.aggregate_csv_text())
            failed = result.failures()
            if failed:
                _write_failures(out + ".errors.csv", failed)
        return result
    finally:
        if handles is not None:
            for fh in handles:
                fh.close()


def _write_failures(path: str, rows: list[ResultRow]):
    header = [f.name for f in fields(ResultRow)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([_fmt(v) for v in astuple(r)])
