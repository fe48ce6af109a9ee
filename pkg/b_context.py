import copy
import json
import os
from typing import *
from a_config import INIT_RUN_CONFIG, CALIBRATION_FILE, CANONICAL_WORDS_FILE
from c_errors import DomainError

ROOT_DIR = os.path.dirname(os.path.abspath(__file__))


def resolve_path(path: str) -> str:
    """Относительные пути данных считаются от корня проекта."""
    return path if os.path.isabs(path) else os.path.join(ROOT_DIR, path)

def load_json(path: str) -> dict:
    with open(resolve_path(path), "r", encoding="utf-8") as fh:
        return json.load(fh)

def deep_merge(base: dict, update: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in (update or {}).items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


class RunContext:
    def __init__(self, config: Optional[dict] = None):
        """ Конфигурация одного запуска: дефолты -> файл конфига -> явные флаги."""
        self.config: dict = deep_merge(INIT_RUN_CONFIG, config or {})
        self.config_path: Optional[str] = None
        self._calibration: Optional[dict] = None

    @classmethod
    def load(cls, path: Optional[str] = None) -> "RunContext":
        ctx = cls()
        if path:
            try:
                data = load_json(path)
            except (OSError, json.JSONDecodeError) as ex:
                raise DomainError(f"cannot read config {path!r}: {ex}") from None
            if not isinstance(data, dict):
                raise DomainError(f"config {path!r} must hold a JSON object")
            ctx.config = deep_merge(ctx.config, data)
            ctx.config_path = path
        return ctx

    def apply_flags(self, flags: dict):
        """Явно заданные флаги (не None) перекрывают и дефолты, и файл."""
        for dotted, value in flags.items():
            if value is None:
                continue
            node = self.config
            parts = dotted.split(".")
            for part in parts[:-1]:
                node = node.setdefault(part, {})
            node[parts[-1]] = value
        return self

    def get(self, dotted: str, default: Any = None) -> Any:
        node: Any = self.config
        for part in dotted.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    @property
    def genus(self) -> int:
        return int(self.config["genus"])

    @property
    def seed(self) -> int:
        return int(self.config["seed"])

    @property
    def jobs(self) -> int:
        return max(1, int(self.config["jobs"]))

    @property
    def calibration(self) -> dict:
        if self._calibration is None:
            self._calibration = load_json(self.config.get("calibration_file", CALIBRATION_FILE))
        return self._calibration

    def output_path(self, key: str, default_name: str) -> str:
        out_dir = self.get("output.dir") or "."
        name = self.get(f"output.{key}") or default_name
        return name if os.path.isabs(name) else os.path.join(out_dir, name)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.config)


_CANONICAL_CACHE: Dict[str, dict] = {}

def canonical_data(path: str = CANONICAL_WORDS_FILE) -> dict:
    """Замороженные канонические слова (gamma0, eta) по родам."""
    if path not in _CANONICAL_CACHE:
        _CANONICAL_CACHE[path] = load_json(path)
    return _CANONICAL_CACHE[path]
