"""
Прогоны по семейству: скан по (m,n), пары alpha_k/beta_k, оценки роста, перепись инвариантов,
сводка приёмочных проверок. Строки независимы и считаются пулом воркеров.
"""
import asyncio
import csv
import json
import math
import os
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import partial
from typing import *

from a_config import *
from b_context import RunContext
from c_errors import BoundaryEscape, DomainError, NonConvergence, ToolkitError
from c_log import ErrorHandler
from c_utils import fmt_float, parse_range, spawn_seeds
from e_optimizer import LengthOptimizer, OptOptions
from GEOM.hyperbolic import length_floor_from_intersections
from GEOM.representation import FNCoords, build_representation, geodesic_length
from WORDS.family import (
    alpha_word, beta_word, family_intersection_count, family_word, pair_index_n, pair_index_set,
    pair_m_of_k, self_intersection_formula,
)
from WORDS.intersect import is_filling, self_intersection_oracle
from WORDS.words import CurveWord


@dataclass
class FamilyScanRow:
    m: int
    n: int
    i_formula: int
    i_oracle: Optional[int]
    m_gamma: float
    eta_at_opt: float
    sys1: float
    sys2: float
    converged: bool
    status: str = "ok"
    i_closed: Optional[int] = None

    def csv_row(self) -> List[str]:
        return [
            str(self.m), str(self.n), str(self.i_formula),
            "" if self.i_oracle is None else str(self.i_oracle),
            fmt_float(self.m_gamma), fmt_float(self.eta_at_opt),
            fmt_float(self.sys1), fmt_float(self.sys2), fmt_float(self.converged),
        ]


@dataclass
class PairRow:
    k: int
    n_of_k: int
    m_of_k: int
    i_alpha: int
    i_beta: int
    m_alpha: float
    m_beta: float
    eta_alpha: float
    eta_beta: float
    sys_alpha: Tuple[float, float] = (math.nan, math.nan)
    sys_beta: Tuple[float, float] = (math.nan, math.nan)
    converged: bool = True

    def csv_row(self) -> List[str]:
        return [
            str(self.k), str(self.n_of_k), str(self.m_of_k), str(self.i_alpha), str(self.i_beta),
            fmt_float(self.m_alpha), fmt_float(self.m_beta), fmt_float(self.eta_alpha), fmt_float(self.eta_beta),
        ]


@dataclass(frozen=True)
class GrowthFit:
    ratio_alpha_max: float
    k_alpha: int
    ratio_beta_min: float
    k_beta: int


@dataclass
class Census:
    values: List[float] = field(default_factory=list)
    words: List[str] = field(default_factory=list)
    L: float = math.inf

    @property
    def count(self) -> int:
        return len(self.values)

    def count_below(self, L: float) -> int:
        return sum(1 for v in self.values if v <= L)


# ============================================================
#  WORKER JOBS (уровень модуля -- уходят в процессы)
# ============================================================

def optimize_job(word: CurveWord, options: OptOptions) -> Dict[str, Any]:
    try:
        result = LengthOptimizer(options).minimize_length(word)
        status = "ok"
    except NonConvergence as ex:
        result = getattr(ex, "result", None)
        status = "nonconvergence"
        if result is None:
            return {"status": status, "error": str(ex)}
    except BoundaryEscape as ex:
        return {"status": "boundary_escape", "error": str(ex)}
    except ToolkitError as ex:
        # строка остаётся в таблице со своим статусом
        return {"status": type(ex).__name__, "error": str(ex)}
    return {
        "status": status,
        "m_gamma": result.m_gamma,
        "eta": result.eta_at_opt,
        "sys1": result.sys_side1.value,
        "sys2": result.sys_side2.value,
        "converged": result.converged,
        "record": result.to_record(),
    }


def oracle_job(word: CurveWord) -> int:
    return self_intersection_oracle(word)


# ============================================================
#  PURE TABLE OPERATIONS
# ============================================================

def growth_fit(rows: Sequence[PairRow]) -> GrowthFit:
    """max m_alpha / ln k и min m_beta / sqrt k по строкам с k >= 15."""
    usable = [r for r in rows if r.k >= 15 and math.isfinite(r.m_alpha) and math.isfinite(r.m_beta)]
    if len(usable) < 4:
        raise DomainError(f"growth fit needs at least 4 rows with k >= 15, got {len(usable)}")
    ra = max(usable, key=lambda r: r.m_alpha / math.log(r.k))
    rb = min(usable, key=lambda r: r.m_beta / math.sqrt(r.k))
    return GrowthFit(ra.m_alpha / math.log(ra.k), ra.k, rb.m_beta / math.sqrt(rb.k), rb.k)


def designer_metric_length(g: int, m: int, base: FNCoords) -> float:
    """Длина alpha = gamma_{m,1} на структуре base с l_eta = ln m / m -- верхняя оценка m_alpha."""
    if m < 2:
        raise DomainError("designer metric needs m >= 2")
    fn = base.with_length(0, math.log(m) / m)
    return geodesic_length(build_representation(fn), family_word(g, m, 1))


def _rows_by_mn(rows: Sequence[FamilyScanRow]) -> Dict[Tuple[int, int], FamilyScanRow]:
    return {(r.m, r.n): r for r in rows}


def acceptance_report(
    rows: Sequence[FamilyScanRow],
    pairs: Sequence[PairRow],
    calibration: Dict[str, Any],
) -> Dict[str, Dict[str, Any]]:
    """Именованные проверки -> {passed, measured, threshold}. Проверка без данных не попадает в отчёт."""
    checks: Dict[str, Dict[str, Any]] = {}
    by_mn = _rows_by_mn(rows)

    with_oracle = [r for r in rows if r.i_oracle is not None and r.i_closed is not None]
    if with_oracle:
        bad = [(r.m, r.n, r.i_closed, r.i_oracle) for r in with_oracle if r.i_closed != r.i_oracle]
        checks["closed_form_matches_oracle"] = {"passed": not bad, "measured": bad, "threshold": 0}

    r2, r20 = by_mn.get((2, 1)), by_mn.get((20, 1))
    if r2 and r20 and r2.converged and r20.converged:
        ratio = calibration["eta_ratio_m20_vs_m2"]
        ceiling = calibration["eta_ceiling_m20"]
        checks["eta_shrinks_m20_vs_m2"] = {
            "passed": r20.eta_at_opt < ratio * r2.eta_at_opt and r20.eta_at_opt < ceiling,
            "measured": [r2.eta_at_opt, r20.eta_at_opt],
            "threshold": [ratio, ceiling],
        }

    trend = [by_mn[(m, 1)] for m in range(2, 21, 2) if (m, 1) in by_mn and by_mn[(m, 1)].converged]
    if len(trend) >= 2:
        tol = calibration["eta_trend_step_tolerance"]
        worst = max(b.eta_at_opt / a.eta_at_opt - 1.0 for a, b in zip(trend, trend[1:]))
        checks["eta_nonincreasing_in_m"] = {"passed": worst <= tol, "measured": worst, "threshold": tol}

    n_rows = [r for (m, n), r in sorted(by_mn.items()) if m == 1 and r.converged]
    if n_rows:
        floor = calibration["eta_floor_m1"]
        low = min(r.eta_at_opt for r in n_rows)
        checks["eta_floor_over_n"] = {"passed": low >= floor, "measured": low, "threshold": floor}

    good_pairs = [p for p in pairs if p.converged]
    if good_pairs:
        top = max(good_pairs, key=lambda p: p.k)
        checks["beta_above_alpha_at_largest_k"] = {
            "passed": top.k > 4 and top.m_beta > top.m_alpha,
            "measured": [top.k, top.m_alpha, top.m_beta],
            "threshold": None,
        }
        floor = calibration["beta_thickness_floor"]
        thick = min(min(p.sys_beta[0], p.sys_beta[1], p.eta_beta) for p in good_pairs)
        checks["beta_structures_thick"] = {"passed": thick >= floor, "measured": thick, "threshold": floor}

        side_floor = calibration["alpha_side_systole_floor"]
        ordered = sorted(good_pairs, key=lambda p: p.k)
        etas = [p.eta_alpha for p in ordered]
        sides = min(min(p.sys_alpha) for p in ordered)
        checks["alpha_pinches_eta_thick_sides"] = {
            "passed": all(b < a for a, b in zip(etas, etas[1:])) and sides >= side_floor,
            "measured": {"eta_alpha": etas, "min_side_systole": sides},
            "threshold": side_floor,
        }
        try:
            fit = growth_fit(good_pairs)
        except DomainError:
            fit = None
        if fit is not None:
            checks["alpha_log_ratio_bounded"] = {
                "passed": fit.ratio_alpha_max <= calibration["alpha_ratio_ceiling"],
                "measured": [fit.ratio_alpha_max, fit.k_alpha],
                "threshold": calibration["alpha_ratio_ceiling"],
            }
            checks["beta_sqrt_ratio_floor"] = {
                "passed": fit.ratio_beta_min >= calibration["beta_ratio_floor"],
                "measured": [fit.ratio_beta_min, fit.k_beta],
                "threshold": calibration["beta_ratio_floor"],
            }
    return checks


def formula_deviation(rows: Sequence[FamilyScanRow]) -> List[Tuple[int, int, int, int]]:
    """(m, n, формула, замкнутая форма) там, где опубликованная формула расходится с подсчётом."""
    return [(r.m, r.n, r.i_formula, r.i_closed) for r in rows if r.i_closed is not None and r.i_formula != r.i_closed]


def failed_checks(checks: Dict[str, Dict[str, Any]]) -> List[str]:
    return [name for name, check in checks.items() if not check["passed"]]


# ============================================================
#  OUTPUT
# ============================================================

def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence[str]]):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _jsonable(value: Any) -> Any:
    if isinstance(value, float):
        return value if math.isfinite(value) else fmt_float(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(path: str, payload: Dict[str, Any]):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


# ============================================================
#  RUNNER
# ============================================================

class ExperimentRunner:
    def __init__(self, context: RunContext, info_handler: ErrorHandler):
        self.context = context
        info_handler.wrap_foreign_methods(self)
        self.info_handler = info_handler
        self.options = OptOptions.from_context(context)

    def _executor(self) -> Executor:
        jobs = self.context.jobs
        return ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else ThreadPoolExecutor(max_workers=1)

    async def _gather(self, calls: List[Tuple[Callable, tuple]]) -> List[Any]:
        sem = asyncio.Semaphore(self.context.jobs)
        loop = asyncio.get_running_loop()
        with self._executor() as pool:
            async def one(fn, args):
                async with sem:
                    return await loop.run_in_executor(pool, partial(fn, *args))
            return await asyncio.gather(*(one(fn, args) for fn, args in calls))

    def run_jobs(self, calls: List[Tuple[Callable, tuple]]) -> List[Any]:
        """Результаты в порядке calls (gather сохраняет порядок)."""
        if not calls:
            return []
        return asyncio.run(self._gather(calls))

    def _job_options(self, count: int) -> List[OptOptions]:
        return [replace(self.options, seed=s) for s in spawn_seeds(self.context.seed, count)]

    # --- family scan ---

    def family_scan(self, g: int, m_range: Sequence[int], n_range: Sequence[int]) -> List[FamilyScanRow]:
        if not m_range or not n_range:
            raise DomainError("scan ranges must be nonempty")
        grid = sorted((m, n) for m in set(m_range) for n in set(n_range))
        words = [family_word(g, m, n) for m, n in grid]
        opt_calls = [(optimize_job, (w, o)) for w, o in zip(words, self._job_options(len(words)))]
        oracle_idx = [i for i, (m, n) in enumerate(grid) if m <= ORACLE_MAX_MN and n <= ORACLE_MAX_MN]
        oracle_calls = [(oracle_job, (words[i],)) for i in oracle_idx]
        results = self.run_jobs(opt_calls + oracle_calls)
        oracles = dict(zip(oracle_idx, results[len(opt_calls):]))

        rows: List[FamilyScanRow] = []
        for i, ((m, n), res) in enumerate(zip(grid, results[:len(opt_calls)])):
            if "m_gamma" in res:
                row = FamilyScanRow(
                    m, n, self_intersection_formula(g, m, n), oracles.get(i),
                    res["m_gamma"], res["eta"], res["sys1"], res["sys2"], res["converged"], res["status"],
                    family_intersection_count(g, m, n),
                )
            else:
                row = FamilyScanRow(
                    m, n, self_intersection_formula(g, m, n), oracles.get(i),
                    math.nan, math.nan, math.nan, math.nan, False, res["status"],
                    family_intersection_count(g, m, n),
                )
                self.info_handler.debug_error_notes(f"[SCAN] m={m} n={n}: {res.get('error')}")
            self.info_handler.debug_info_notes(
                f"[SCAN] m={m} n={n} m_gamma={fmt_float(row.m_gamma)} eta={fmt_float(row.eta_at_opt)} {row.status}"
            )
            rows.append(row)
        return rows

    # --- pairs ---

    def pair_table(self, g: int, n_max: int) -> List[PairRow]:
        ks = pair_index_set(g, n_max)
        words: Dict[str, CurveWord] = {}
        for k in ks:
            for w in (alpha_word(g, k), beta_word(g, k)):
                words.setdefault(str(w), w)
        keys = sorted(words)
        results = dict(zip(keys, self.run_jobs(
            [(optimize_job, (words[key], o)) for key, o in zip(keys, self._job_options(len(keys)))]
        )))

        rows: List[PairRow] = []
        for k in ks:
            ra, rb = results[str(alpha_word(g, k))], results[str(beta_word(g, k))]
            ok = "m_gamma" in ra and "m_gamma" in rb
            nan2 = (math.nan, math.nan)
            row = PairRow(
                k=k, n_of_k=pair_index_n(g, k), m_of_k=pair_m_of_k(g, k),
                i_alpha=family_intersection_count(g, pair_m_of_k(g, k), 1),
                i_beta=family_intersection_count(g, 1, pair_index_n(g, k)),
                m_alpha=ra.get("m_gamma", math.nan), m_beta=rb.get("m_gamma", math.nan),
                eta_alpha=ra.get("eta", math.nan), eta_beta=rb.get("eta", math.nan),
                sys_alpha=(ra["sys1"], ra["sys2"]) if "sys1" in ra else nan2,
                sys_beta=(rb["sys1"], rb["sys2"]) if "sys1" in rb else nan2,
                converged=ok and ra["converged"] and rb["converged"],
            )
            self.info_handler.debug_info_notes(
                f"[PAIRS] k={k} m_alpha={fmt_float(row.m_alpha)} m_beta={fmt_float(row.m_beta)}"
            )
            rows.append(row)
        return rows

    # --- census ---

    def spectrum_census(self, words: Sequence[CurveWord], L: Optional[float] = None) -> Census:
        """Отсортированные m_gamma <= L; без склейки по орбитам MCG, только по слову."""
        limit = math.inf if L is None else float(L)
        if not words:
            return Census(L=limit)
        for i, w in enumerate(words):
            if not is_filling(w):
                raise DomainError(f"census word #{i} ({w}) is not filling")
        results = self.run_jobs(
            [(optimize_job, (w, o)) for w, o in zip(words, self._job_options(len(words)))]
        )
        pairs = sorted(
            (res["m_gamma"], str(w)) for w, res in zip(words, results)
            if "m_gamma" in res and res["m_gamma"] <= limit
        )
        return Census([v for v, _ in pairs], [w for _, w in pairs], limit)

    # --- command-level runs ---

    def _summary(self, kind: str, body: Dict[str, Any]) -> Dict[str, Any]:
        return {"kind": kind, "config": self.context.to_dict(), **body}

    def run_scan(self) -> Tuple[List[FamilyScanRow], Dict[str, Any]]:
        g = self.context.genus
        rows = self.family_scan(g, parse_range(self.context.get("scan.m")), parse_range(self.context.get("scan.n")))
        checks = acceptance_report(rows, [], self.context.calibration)
        write_csv(self.context.output_path("csv", "scan.csv"), CSV_HEADER, [r.csv_row() for r in rows])
        summary = self._summary("scan", {
            "rows": [asdict(r) for r in rows],
            "closed_form_counts": {f"{r.m},{r.n}": r.i_closed for r in rows},
            "formula_deviation": formula_deviation(rows),
            "checks": checks,
        })
        write_json(self.context.output_path("json", "scan.json"), summary)
        return rows, summary

    def run_pairs(self) -> Tuple[List[PairRow], Dict[str, Any]]:
        g = self.context.genus
        rows = self.pair_table(g, int(self.context.get("scan.nmax")))
        checks = acceptance_report([], rows, self.context.calibration)
        try:
            fit = asdict(growth_fit([r for r in rows if r.converged]))
        except DomainError as ex:
            fit = {"error": str(ex)}
        write_csv(self.context.output_path("csv", "pairs.csv"), PAIRS_HEADER, [r.csv_row() for r in rows])
        summary = self._summary("pairs", {
            "rows": [asdict(r) for r in rows],
            "closed_form_counts": {str(r.k): [r.i_alpha, r.i_beta] for r in rows},
            "growth_fit": fit,
            "checks": checks,
        })
        write_json(self.context.output_path("json", "pairs.json"), summary)
        return rows, summary

    def run_census(self) -> Tuple[Census, Dict[str, Any]]:
        g = self.context.genus
        top = int(self.context.get("scan.max_mn"))
        grid = [(m, n) for m in range(1, top + 1) for n in range(1, top + 1)]
        census = self.spectrum_census([family_word(g, m, n) for m, n in grid], self.context.get("scan.L"))
        floors = {f"{m},{n}": length_floor_from_intersections(family_intersection_count(g, m, n)) for m, n in grid}
        by_word = {str(family_word(g, m, n)): f"{m},{n}" for m, n in grid}
        below_floor = [
            by_word[w] for v, w in zip(census.values, census.words) if v < floors[by_word[w]]
        ]
        checks = {
            "census_above_intersection_floor": {"passed": not below_floor, "measured": below_floor, "threshold": 0},
        }
        rows = [[by_word[w], w, fmt_float(v)] for v, w in zip(census.values, census.words)]
        write_csv(self.context.output_path("csv", "census.csv"), ["mn", "word", "m_gamma"], rows)
        summary = self._summary("census", {
            "count": census.count,
            "L": census.L,
            "values": census.values,
            "words": census.words,
            "note": "entries are deduplicated by word only, not by mapping class orbit",
            "checks": checks,
        })
        write_json(self.context.output_path("json", "census.json"), summary)
        return census, summary
