import asyncio

import pytest

from c_errors import (
    AcceptanceFailure, BoundaryEscape, DomainError, NonConvergence, NotHyperbolic, NumericError, WordParseError,
    exit_code_for,
)
from c_log import ErrorHandler


class _Worker:
    def __init__(self, handler):
        handler.wrap_foreign_methods(self)

    def ok(self, x):
        return x + 1

    def domain(self):
        raise DomainError("bad genus")

    def foreign(self, x):
        return {}[x]

    async def later(self, x):
        raise NumericError(f"nan at {x}")

    @staticmethod
    def static():
        raise ZeroDivisionError("static")

    def _private(self):
        raise RuntimeError("not wrapped")


@pytest.mark.parametrize("ex, code", [
    (WordParseError("x9", 1), 2),
    (BoundaryEscape(1, 1e-4, 0.5), 3),
    (NonConvergence(1e-2, 100), 4),
    (AcceptanceFailure(["eta_shrinks_m20_vs_m2"]), 5),
    (DomainError("genus"), 1),
    (NotHyperbolic(1.5), 1),
    (KeyError("x"), 1),
])
def test_exit_codes(ex, code):
    assert exit_code_for(ex) == code


def test_error_payloads():
    ex = WordParseError("c1", 3, "unknown generator")
    assert (ex.token, ex.position) == ("c1", 3)
    assert "c1" in str(ex) and "3" in str(ex)
    assert isinstance(ex, ValueError)
    assert AcceptanceFailure(["a", "b"]).failed == ["a", "b"]


def test_wrapped_methods_reraise_and_record():
    handler = ErrorHandler(quiet=True)
    worker = _Worker(handler)
    assert worker.ok(1) == 2
    assert worker.ok.__name__ == "ok"

    with pytest.raises(DomainError):
        worker.domain()
    assert "_Worker.domain -> DomainError: bad genus" in handler.debug_err_list[-1]

    with pytest.raises(KeyError):
        worker.foreign("k")
    assert "Stack:" in handler.debug_err_list[-1]
    assert "[SYNC ERROR]" in handler.debug_err_list[-1]

    with pytest.raises(ZeroDivisionError):
        worker.static()
    assert len(handler.debug_err_list) == 3

    with pytest.raises(RuntimeError):
        worker._private()
    assert len(handler.debug_err_list) == 3


def test_wrapped_coroutine():
    handler = ErrorHandler(quiet=True)
    worker = _Worker(handler)
    with pytest.raises(NumericError):
        asyncio.run(worker.later(4))
    assert "NumericError: nan at 4" in handler.debug_err_list[-1]


def test_wrap_is_idempotent():
    handler = ErrorHandler(quiet=True)
    worker = _Worker(handler)
    handler.wrap_foreign_methods(worker)
    with pytest.raises(DomainError):
        worker.domain()
    assert len(handler.debug_err_list) == 1


def test_quiet_and_loud_notes(capsys):
    quiet = ErrorHandler(quiet=True)
    quiet.debug_info_notes("[SCAN] m=1")
    assert capsys.readouterr().out == ""
    assert quiet.debug_info_list[0].startswith("[SCAN] m=1 Time: ")

    loud = ErrorHandler()
    loud.debug_error_notes("[SCAN] boom")
    assert "[SCAN] boom" in capsys.readouterr().out
    loud.debug_info_notes("hidden", is_print=False)
    assert capsys.readouterr().out == ""
