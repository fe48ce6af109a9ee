"""
Минимизация длины l_gamma по координатам FN: оценка m_gamma и оптимальной метрики.
"""
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from a_config import *
from b_context import RunContext
from c_errors import BoundaryEscape, DomainError, NonConvergence, NotHyperbolic, NumericError
from c_log import ErrorHandler
from c_utils import make_rng, spawn_seeds
from GEOM.probe import SystoleReport, subsurface_systole
from GEOM.representation import FNCoords, build_representation, geodesic_length, random_fn_coords
from WORDS.intersect import is_filling
from WORDS.words import CurveWord, dehn_reduce


MIN_SEARCH_LENGTH: float = 1e-8 # --------------------- # ниже -- штраф, до этого ловим выход на границу
NM_ROUNDS: int = 8 # ---------------------------------- # перезапуски симплекса внутри одного старта
SIMPLEX_STEP: float = 0.3


@dataclass(frozen=True)
class OptOptions:
    starts: int = OPT_STARTS
    tol: float = OPT_VALUE_TOL
    max_evals: int = OPT_MAX_EVALS
    escape_threshold: float = OPT_ESCAPE_THRESHOLD
    decrease_threshold: float = OPT_DECREASE_THRESHOLD
    grad_tol: float = OPT_GRAD_TOL
    fd_step: float = OPT_FD_STEP
    length_box: Tuple[float, float] = OPT_LENGTH_BOX
    thick_length: float = OPT_THICK_LENGTH
    seed: int = 0
    systole_depth: int = SYSTOLE_DEPTH

    def __post_init__(self):
        if self.starts < 1:
            raise DomainError("need at least one start")
        if self.max_evals < 10:
            raise DomainError("max_evals is too small")

    @classmethod
    def from_context(cls, ctx: RunContext) -> "OptOptions":
        opt = ctx.get("optimizer", {}) or {}
        return cls(
            starts=int(opt.get("starts", OPT_STARTS)),
            tol=float(opt.get("tol", OPT_VALUE_TOL)),
            max_evals=int(opt.get("max_evals", OPT_MAX_EVALS)),
            escape_threshold=float(opt.get("escape_threshold", OPT_ESCAPE_THRESHOLD)),
            decrease_threshold=float(opt.get("decrease_threshold", OPT_DECREASE_THRESHOLD)),
            seed=ctx.seed,
            systole_depth=int(ctx.get("systole_depth", SYSTOLE_DEPTH)),
        )


@dataclass
class OptResult:
    word: CurveWord
    m_gamma: float
    x_gamma: FNCoords
    eta_at_opt: float
    sys_side1: Optional[SystoleReport]
    sys_side2: Optional[SystoleReport]
    starts: int
    converged: bool
    spread: float
    values: Tuple[float, ...] = ()
    evaluations: int = 0

    def to_record(self) -> dict:
        return {
            "word": str(self.word),
            "genus": self.word.genus,
            "m_gamma": self.m_gamma,
            "eta_at_opt": self.eta_at_opt,
            "sys1": self.sys_side1.to_record() if self.sys_side1 else None,
            "sys2": self.sys_side2.to_record() if self.sys_side2 else None,
            "starts": self.starts,
            "converged": self.converged,
            "spread": self.spread,
            "values": list(self.values),
            "evaluations": self.evaluations,
            "x_gamma": self.x_gamma.to_record(),
            "twist_residues": list(self.x_gamma.twist_residues()),
        }


@dataclass(frozen=True)
class Certificate:
    grad_norm: float
    hessian_diag: Tuple[float, ...]
    passed: bool
    reason: str = ""


class LengthObjective:
    """l_gamma как функция (ln lengths, twists); вне области -- штраф."""

    def __init__(self, word: CurveWord):
        if not dehn_reduce(word.letters, word.genus):
            raise DomainError(f"word {word} is the identity in the surface group")
        self.word = word
        self.genus = word.genus
        self.size = 3 * word.genus - 3
        self.evaluations = 0
        self.best = math.inf
        self.best_x: Optional[np.ndarray] = None

    def coords(self, x: np.ndarray) -> Optional[FNCoords]:
        logs = x[:self.size]
        if np.any(logs < math.log(MIN_SEARCH_LENGTH)) or np.any(logs > math.log(MAX_CUFF_LENGTH)):
            return None
        if not np.all(np.isfinite(x)):
            return None
        return FNCoords.from_vector(self.genus, x)

    def __call__(self, x: np.ndarray) -> float:
        self.evaluations += 1
        fn = self.coords(np.asarray(x, dtype=float))
        if fn is None:
            return OPT_PENALTY
        try:
            value = geodesic_length(build_representation(fn), self.word)
        except (NotHyperbolic, NumericError):
            return OPT_PENALTY
        if value < self.best:
            self.best, self.best_x = value, np.array(x, dtype=float)
        return value

    def gradient(self, x: np.ndarray, step: float = OPT_FD_STEP) -> np.ndarray:
        """Центральные разности по каждой координате."""
        x = np.asarray(x, dtype=float)
        grad = np.zeros_like(x)
        for i in range(len(x)):
            e = np.zeros_like(x)
            e[i] = step
            grad[i] = (self(x + e) - self(x - e)) / (2.0 * step)
        return grad


class _EscapeWatch:
    """Колбэк симплекса: короткая манжета при всё ещё быстром убывании -- выход на границу."""

    def __init__(self, objective: LengthObjective, options: OptOptions):
        self.objective = objective
        self.options = options
        self.history: List[float] = []

    def __call__(self, xk):
        best = self.objective.best
        prev = self.history[-1] if self.history else math.inf
        self.history.append(best)
        lengths = np.exp(np.asarray(xk)[:self.objective.size])
        i = int(np.argmin(lengths))
        rate = prev - best if math.isfinite(prev) else math.inf
        if lengths[i] < self.options.escape_threshold and rate > self.options.decrease_threshold:
            raise BoundaryEscape(i, float(lengths[i]), float(rate))


class LengthOptimizer:
    def __init__(self, options: Optional[OptOptions] = None, info_handler: Optional[ErrorHandler] = None):
        self.options = options or OptOptions()
        self.info_handler = info_handler or ErrorHandler(quiet=True)
        self.info_handler.wrap_foreign_methods(self)

    # --- starts ---

    def start_points(self, genus: int) -> List[np.ndarray]:
        """Первый старт -- симметричная толстая точка, остальные -- лог-равномерно в боксе."""
        opts = self.options
        points = [FNCoords.symmetric(genus, opts.thick_length).to_vector()]
        for seed in spawn_seeds(opts.seed, opts.starts - 1):
            fn = random_fn_coords(genus, make_rng(seed), opts.length_box, "period")
            points.append(fn.to_vector())
        return points

    def _run_start(self, word: CurveWord, x0: np.ndarray) -> Tuple[np.ndarray, float, int, List[float]]:
        opts = self.options
        objective = LengthObjective(word)
        watch = _EscapeWatch(objective, opts)
        x, value = np.asarray(x0, dtype=float), objective(x0)
        for round_no in range(NM_ROUNDS):
            left = opts.max_evals - objective.evaluations
            if left <= 0:
                break
            step = SIMPLEX_STEP if round_no == 0 else SIMPLEX_STEP / 3.0
            simplex = np.vstack([x] + [x + step * e for e in np.eye(len(x))])
            res = minimize(
                objective, x, method="Nelder-Mead", callback=watch,
                options={"maxfev": left, "xatol": 1e-6, "fatol": opts.tol * 1e-3, "adaptive": True, "initial_simplex": simplex},
            )
            gain = value - float(res.fun)
            if res.fun < value:
                x, value = np.asarray(res.x, dtype=float), float(res.fun)
            if gain < opts.tol * 1e-2:
                break

        # доводка квази-Ньютоном с центральным градиентом
        if objective.evaluations < opts.max_evals:
            res = minimize(
                objective, x, method="BFGS",
                jac=lambda z: objective.gradient(z, opts.fd_step),
                options={"gtol": opts.grad_tol * 0.1, "maxiter": 200},
            )
            if res.fun < value:
                x, value = np.asarray(res.x, dtype=float), float(res.fun)

        lengths = np.exp(x[:objective.size])
        i = int(np.argmin(lengths))
        if lengths[i] < opts.escape_threshold:
            hist = watch.history
            rate = hist[-2] - hist[-1] if len(hist) >= 2 else math.inf
            raise BoundaryEscape(i, float(lengths[i]), float(rate))
        return x, value, objective.evaluations, watch.history

    # --- public ---

    def minimize_length(self, word: CurveWord) -> OptResult:
        """
        Мультистарт: симплекс с перезапусками, доводка BFGS. Сходимость -- разброс значений
        по стартам <= tol. Координаты не приводятся по модулю полных твистов (это сменило бы
        разметку), вычеты твистов идут отдельным полем записи.
        """
        opts = self.options
        outcomes = []
        evaluations = 0
        for x0 in self.start_points(word.genus):
            x, value, evals, _ = self._run_start(word, x0)
            outcomes.append((value, x))
            evaluations += evals
        values = tuple(v for v, _ in outcomes)
        best_value, best_x = min(outcomes, key=lambda p: p[0])
        spread = max(values) - min(values)

        x_gamma = FNCoords.from_vector(word.genus, best_x)
        rep = build_representation(x_gamma)
        m_gamma = geodesic_length(rep, word)
        result = OptResult(
            word=word,
            m_gamma=m_gamma,
            x_gamma=x_gamma,
            eta_at_opt=x_gamma.lengths[0],
            sys_side1=subsurface_systole(rep, 1, opts.systole_depth),
            sys_side2=subsurface_systole(rep, 2, opts.systole_depth),
            starts=len(outcomes),
            converged=spread <= opts.tol,
            spread=spread,
            values=values,
            evaluations=evaluations,
        )
        if not result.converged:
            ex = NonConvergence(spread, evaluations)
            ex.result = result
            raise ex
        return result

    def optimality_certificate(self, result: OptResult) -> Certificate:
        """Центральный градиент в x_gamma <= grad_tol и неотрицательная диагональ гессиана."""
        if not result.converged:
            raise DomainError("certificate needs a converged result")
        opts = self.options
        objective = LengthObjective(result.word)
        x = result.x_gamma.to_vector()
        f0 = objective(x)
        grad = objective.gradient(x, opts.fd_step)
        grad_norm = float(np.linalg.norm(grad))
        h = math.sqrt(opts.fd_step) # --- шаг для вторых разностей крупнее
        diag = []
        for i in range(len(x)):
            e = np.zeros_like(x)
            e[i] = h
            diag.append((objective(x + e) - 2.0 * f0 + objective(x - e)) / (h * h))
        reasons = []
        if grad_norm > opts.grad_tol:
            reasons.append(f"gradient norm {grad_norm:.3e} > {opts.grad_tol:.1e}")
        if min(diag) < -opts.grad_tol:
            reasons.append(f"negative curvature {min(diag):.3e}")
        return Certificate(grad_norm, tuple(float(v) for v in diag), not reasons, "; ".join(reasons))

    def inf_invariant(self, word: CurveWord) -> float:
        if not is_filling(word):
            raise DomainError(f"word {word} is not filling; its length has no minimum")
        return self.minimize_length(word).m_gamma


def minimize_length(word: CurveWord, starts: Optional[int] = None, opts: Optional[OptOptions] = None) -> OptResult:
    options = opts or OptOptions()
    if starts is not None:
        options = replace(options, starts=starts)
    return LengthOptimizer(options).minimize_length(word)


def inf_invariant(word: CurveWord, opts: Optional[OptOptions] = None) -> float:
    return LengthOptimizer(opts).inf_invariant(word)


def optimality_certificate(result: OptResult, opts: Optional[OptOptions] = None) -> Certificate:
    return LengthOptimizer(opts).optimality_certificate(result)
