from datetime import datetime
import functools
import inspect
import traceback
from pprint import pformat
from typing import Any, Callable, List

import pytz

from a_config import TIME_ZONE
from c_errors import ToolkitError

TZ_LOCATION = pytz.timezone(TIME_ZONE)

def log_time():
    now = datetime.now(TZ_LOCATION)
    return now.strftime("%Y-%m-%d %H:%M:%S")


class Total_Logger:
    def __init__(self, quiet: bool = False):
        self.quiet = quiet
        self.debug_err_list: List[str] = []
        self.debug_info_list: List[str] = []

    def _note(self, store: List[str], data: str, level: str, is_print: bool):
        line = f"{data} Time: {log_time()}[{level}]"
        store.append(line)
        if is_print and not self.quiet:
            print(line)

    # debug
    def debug_error_notes(self, data: str, is_print: bool = True):
        self._note(self.debug_err_list, data, "ERROR", is_print)

    def debug_info_notes(self, data: str, is_print: bool = True):
        self._note(self.debug_info_list, data, "INFO", is_print)

    def _exception_text(self, func: Callable, ex: BaseException, call: dict, tag: str) -> str:
        if isinstance(ex, ToolkitError):
            # свои ошибки ожидаемы: хватает одной строки
            return f"{func.__qualname__} -> {type(ex).__name__}: {ex}"
        return (
            f"[{tag} ERROR] {func.__qualname__} -> {ex}\n"
            f"Args:\n{pformat(call, width=100)}\n"
            f"Stack:\n{traceback.format_exc()}"
        )

    def total_exception_decor(self, func):
        """
        Логирует исключение вызова и пробрасывает его дальше: коды выхода CLI
        строятся по типу исключения наверху.
        """
        if inspect.iscoroutinefunction(func):
            @functools.wraps(func)
            async def wrapper(*args, **kwargs):
                try:
                    return await func(*args, **kwargs)
                except Exception as ex:
                    self.debug_error_notes(self._exception_text(func, ex, {"args": args, "kwargs": kwargs}, "ASYNC"))
                    raise
        else:
            @functools.wraps(func)
            def wrapper(*args, **kwargs):
                try:
                    return func(*args, **kwargs)
                except Exception as ex:
                    self.debug_error_notes(self._exception_text(func, ex, {"args": args, "kwargs": kwargs}, "SYNC"))
                    raise
        wrapper._is_wrapped = True
        return wrapper


class ErrorHandler(Total_Logger):
    def __init__(self, quiet: bool = False):
        super().__init__(quiet=quiet)

    def _target(self, obj: Any, name: str, attr: Any):
        if isinstance(attr, staticmethod):
            return attr.__func__
        if isinstance(attr, classmethod) or inspect.isfunction(attr):
            return getattr(obj, name)
        return None

    def wrap_foreign_methods(self, obj):
        """
        Оборачивает публичные методы объекта (обычные, classmethod, staticmethod)
        декоратором total_exception_decor. Приватные и уже обёрнутые не трогает.
        """
        for name, attr in vars(type(obj)).items():
            if name.startswith("_") or getattr(getattr(obj, name), "_is_wrapped", False):
                continue
            func = self._target(obj, name, attr)
            if func is not None:
                setattr(obj, name, self.total_exception_decor(func))
