from typing import *
from a_config import *
from c_utils import fmt_float


def _head(title: str) -> str:
    return f" {title} ".center(HEAD_WIDTH, HEAD_LINE_TYPE)

def _mark(passed: Optional[bool]) -> str:
    if passed is None:
        return EMO_ZERO
    return EMO_SUCCESS if passed else EMO_LOSE

def _val(v: Any) -> str:
    if v is None or v == "":
        return "-"
    if isinstance(v, (bool, int, float)):
        return fmt_float(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_val(x) for x in v) + "]"
    return str(v)


class ReportTemplates:
    """
    Текстовые отчёты команд CLI. Один формат чисел (12 значащих цифр),
    заголовок шириной HEAD_WIDTH.
    """

    @staticmethod
    def lines(title: str, fields: Sequence[Tuple[str, Any]]) -> str:
        out = [_head(title)]
        for key, value in fields:
            out.append(f"{key}: {_val(value)}")
        return "\n".join(out)

    def intersection_report(self, body: dict) -> str:
        fields = [("genus", body.get("genus"))]
        for i, w in enumerate(body.get("words", []), start=1):
            fields += [
                (f"word {i}", w["word"]),
                (f"  self", w["self"]),
                (f"  filling", w["filling"]),
                (f"  simple", w["self"] == 0),
            ]
            if "separating" in w:
                fields.append((f"  separating", w["separating"]))
        if "pair" in body:
            fields.append(("pair", body["pair"]))
        if "family" in body:
            fam = body["family"]
            fields += [
                ("family (m, n)", [fam["m"], fam["n"]]),
                ("formula", fam["formula"]),
                ("closed form", fam["closed_form"]),
                ("oracle", fam["oracle"]),
            ]
        return self.lines("INTERSECTION", fields)

    def length_report(self, body: dict) -> str:
        return self.lines("LENGTH", [
            ("word", body["word"]),
            ("length", body["length"]),
            ("eta length", body["eta"]),
            ("relator defect", body["relator_defect"]),
            ("coords", body["coords"]),
        ])

    def optimization_summary(self, record: dict, certificate: Optional[dict] = None) -> str:
        fields = [
            ("word", record["word"]),
            ("m_gamma", record["m_gamma"]),
            ("eta at opt", record["eta_at_opt"]),
            ("sys side 1", record["sys1"]["value"] if record.get("sys1") else None),
            ("sys side 2", record["sys2"]["value"] if record.get("sys2") else None),
            ("starts", record["starts"]),
            ("spread", record["spread"]),
            (f"converged {_mark(record['converged'])}", record["converged"]),
            ("evaluations", record["evaluations"]),
        ]
        if certificate is not None:
            fields += [
                (f"certificate {_mark(certificate['passed'])}", certificate["passed"]),
                ("grad norm", certificate["grad_norm"]),
            ]
            if certificate.get("reason"):
                fields.append(("reason", certificate["reason"]))
        if "closed_form" in record:
            cf = record["closed_form"]
            fields += [
                ("closed form", cf["value"]),
                (f"relative gap {_mark(cf['agrees'])}", cf["relative_gap"]),
            ]
        return self.lines("OPTIMIZE", fields)

    def bounds_report(self, body: dict) -> str:
        return self.lines("BOUNDS", list(body.items()))

    def experiment_summary(self, summary: dict, outputs: Sequence[str] = ()) -> str:
        out = [_head(str(summary.get("kind", "run")).upper())]
        if "count" in summary:
            out.append(f"count: {summary['count']}")
        fit = summary.get("growth_fit")
        if isinstance(fit, dict) and "ratio_alpha_max" in fit:
            out.append(f"max m_alpha/ln k: {fmt_float(fit['ratio_alpha_max'])} (k={fit['k_alpha']})")
            out.append(f"min m_beta/sqrt k: {fmt_float(fit['ratio_beta_min'])} (k={fit['k_beta']})")
        deviation = summary.get("formula_deviation")
        if deviation:
            cells = ", ".join(f"({m},{n}) {formula}->{closed}" for m, n, formula, closed in deviation)
            out.append(f"formula vs closed form: {cells}")
        for name, check in (summary.get("checks") or {}).items():
            out.append(f"{_mark(check['passed'])} {name}: {_val(check.get('measured'))}")
        for path in outputs:
            out.append(f"-> {path}")
        return "\n".join(out)
