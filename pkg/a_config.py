from typing import *

# --- CORE ---
DEFAULT_TOL: float = 1e-9 # ------------------ # абсолютный допуск по умолчанию
IDENTITY_TOL: float = 1e-12 # ---------------- # допуск для гиперболических тождеств
RELATOR_TOL: float = 1e-7 # ------------------ # relator -> +-identity

# --- GEOMETRY ---
MAX_CUFF_LENGTH: float = 50.0 # -------------- # предел длины манжеты (численная безопасность)
RENORM_BOUND: float = 1e100 # ---------------- # перенормировка ScaledIsometry
ACOSH_LOG_BRANCH: float = 1e8 # -------------- # выше -- arccosh в логарифмической форме
HYPERBOLIC_MARGIN: float = 1e-9 # ------------ # |tr| > 2 + margin для проверки дискретности
MP_DPS: int = 40 # --------------------------- # точность mpmath для голономии и оракулов

# --- WORDS ---
REPS_CAP: int = 512 # ------------------------ # предел BFS по кратчайшим представителям
DRAWING_MAX_ITERS: int = 5000 # -------------- # итерации починки рисунка кривой
DRAWING_SEED: int = 7

# --- OPTIMIZER ---
OPT_STARTS: int = 8
OPT_VALUE_TOL: float = 1e-4 # ---------------- # разброс значений между стартами
OPT_ESCAPE_THRESHOLD: float = 1e-3 # --------- # манжета короче -- кандидат на выход на границу
OPT_DECREASE_THRESHOLD: float = 1e-6 # ------- # скорость убывания за итерацию
OPT_MAX_EVALS: int = 20000 # ----------------- # бюджет вычислений на старт
OPT_LENGTH_BOX: Tuple[float, float] = (0.1, 6.0)
OPT_THICK_LENGTH: float = 2.0 # -------------- # симметричный толстый старт
OPT_GRAD_TOL: float = 1e-4
OPT_FD_STEP: float = 1e-5
OPT_PENALTY: float = 1e9 # ------------------- # значение вне допустимой области

# --- SYSTOLE ---
SYSTOLE_DEPTH: int = 12
SYSTOLE_WORD_BUDGET: int = 200000 # ---------- # сколько слов максимум перебирать

# --- EXPERIMENTS ---
SCAN_M_RANGE: str = "1..20"
SCAN_N_RANGE: str = "1"
PAIRS_N_MAX: int = 6
CENSUS_MAX_MN: int = 3
ORACLE_MAX_MN: int = 3 # --------------------- # колонка i_oracle заполняется до этого m,n
JOBS: int = 4 # ------------------------------ # ограничивает количество одновременных задач
CSV_HEADER: List[str] = ["m", "n", "i_formula", "i_oracle", "m_gamma", "eta_at_opt", "sys1", "sys2", "converged"]
PAIRS_HEADER: List[str] = ["k", "n_of_k", "m_of_k", "i_alpha", "i_beta", "m_alpha", "m_beta", "eta_alpha", "eta_beta"]

# --- SYSTEM ---
TIME_ZONE: str = "UTC"
DATA_DIR: str = "data"
CANONICAL_WORDS_FILE: str = "data/canonical_words.json"
CALIBRATION_FILE: str = "data/calibration.json"
OUT_DIR: str = "out"

# --- STYLES ---
SIG_DIGITS: int = 12 # ----------------------- # значащие цифры во всём выводе
HEAD_WIDTH: int = 35
HEAD_LINE_TYPE: str = "-"
EMO_SUCCESS: str = "🟢"
EMO_LOSE: str = "🔴"
EMO_ZERO: str = "⚪"


# ------- RUN CONFIG DEFAULT ------

INIT_RUN_CONFIG = {
    "genus": 2,
    "seed": 0,
    "jobs": JOBS,
    "optimizer": {
        "starts": OPT_STARTS,
        "tol": OPT_VALUE_TOL,
        "max_evals": OPT_MAX_EVALS,
        "escape_threshold": OPT_ESCAPE_THRESHOLD,
        "decrease_threshold": OPT_DECREASE_THRESHOLD,
    },
    "scan": {
        "m": SCAN_M_RANGE, # диапазон m ("1..20" | "1,2,5" | "3")
        "n": SCAN_N_RANGE,
        "nmax": PAIRS_N_MAX,
        "max_mn": CENSUS_MAX_MN,
        "L": None, # None -- без ограничения сверху
    },
    "systole_depth": SYSTOLE_DEPTH,
    "output": {
        "dir": OUT_DIR,
        "csv": None, # None -- имя по команде
        "json": None,
    },
}
