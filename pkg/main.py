import argparse
import sys
from typing import *

from a_config import *
from b_context import RunContext
from c_errors import AcceptanceFailure, DomainError, ToolkitError, exit_code_for, EXIT_OK
from c_log import ErrorHandler
from c_utils import make_rng
from d_templates import ReportTemplates
from e_optimizer import LengthOptimizer, OptOptions
from f_experiments import ExperimentRunner, failed_checks, write_json
from GEOM.hyperbolic import (
    collar_width, min_collar_plus_linear, minimal_filling_closed_form, winding_difference_bound, winding_length,
)
from GEOM.probe import collar_lower_bound_terms, systole_upper_bound
from GEOM.representation import (
    FNCoords, build_representation, eta_length, geodesic_length, random_fn_coords, relator_defect,
)
from WORDS.family import family_intersection_count, family_word, gamma0, self_intersection_formula
from WORDS.intersect import is_filling, is_separating, pair_intersection_oracle, self_intersection_oracle
from WORDS.words import CurveWord, class_key, normalize, parse_word


def _floats(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(part) for part in text.replace(",", " ").split()]
    except ValueError as ex:
        raise DomainError(f"bad number list {text!r}: {ex}") from None


class ToolkitCli:
    """Тонкий диспетчер: команды -> библиотека -> отчёт + запись."""

    def __init__(self, context: RunContext, info_handler: ErrorHandler):
        self.context = context
        info_handler.wrap_foreign_methods(self)
        self.info_handler = info_handler
        self.templates = ReportTemplates()

    def _say(self, text: str):
        if not self.info_handler.quiet:
            print(text)

    # --- inputs ---

    def word_from_args(self, args) -> CurveWord:
        if getattr(args, "family", None):
            g, m, n = args.family
            return family_word(g, m, n)
        text = " ".join(args.word or [])
        return parse_word(text, genus=args.genus)

    def coords_from_args(self, args, genus: int) -> FNCoords:
        lengths, twists = _floats(args.lengths), _floats(args.twists)
        if lengths is None:
            fn = random_fn_coords(genus, make_rng(self.context.seed))
            return fn if twists is None else FNCoords(genus, fn.lengths, tuple(twists))
        return FNCoords(genus, tuple(lengths), tuple(twists) if twists is not None else (0.0,) * len(lengths))

    # --- commands ---

    def cmd_intersect(self, args) -> int:
        body: Dict[str, Any] = {}
        if args.family:
            g, m, n = args.family
            words = [family_word(g, m, n)]
            body["family"] = {
                "m": m, "n": n,
                "formula": self_intersection_formula(g, m, n),
                "closed_form": family_intersection_count(g, m, n),
                "oracle": self_intersection_oracle(words[0]),
            }
        else:
            words = [parse_word(w, genus=args.genus) for w in args.word]
            if not words:
                raise DomainError("no words given")
            g = max(w.genus for w in words)
            words = [CurveWord(g, w.letters) for w in words]
        body["genus"] = words[0].genus
        body["words"] = []
        for w in words:
            entry = {"word": str(w), "self": self_intersection_oracle(w), "filling": is_filling(w)}
            if entry["self"] == 0:
                entry["separating"] = is_separating(w)
            body["words"].append(entry)
        if len(words) == 2:
            body["pair"] = pair_intersection_oracle(words[0], words[1])
        self._say(self.templates.intersection_report(body))
        return EXIT_OK

    def cmd_length(self, args) -> int:
        word = self.word_from_args(args)
        fn = self.coords_from_args(args, word.genus)
        rep = build_representation(fn)
        body = {
            "word": str(word),
            "length": geodesic_length(rep, word),
            "eta": eta_length(fn),
            "relator_defect": relator_defect(rep),
            "coords": list(fn.lengths) + list(fn.twists),
        }
        self._say(self.templates.length_report(body))
        return EXIT_OK

    def cmd_optimize(self, args) -> int:
        word = normalize(self.word_from_args(args))
        if not args.allow_nonfilling and not is_filling(word):
            raise DomainError(f"word {word} is not filling (use --allow-nonfilling to try anyway)")
        optimizer = LengthOptimizer(OptOptions.from_context(self.context), self.info_handler)
        result = optimizer.minimize_length(word)
        record = result.to_record()
        certificate = optimizer.optimality_certificate(result)
        record["certificate"] = {
            "passed": certificate.passed, "grad_norm": certificate.grad_norm,
            "hessian_diag": list(certificate.hessian_diag), "reason": certificate.reason,
        }
        # явная формула сверяется только для канонической gamma0 рода 2
        if word.genus == 2 and class_key(word.letters) == class_key(gamma0(2).letters):
            ref = minimal_filling_closed_form(word.genus)
            gap = abs(result.m_gamma - ref) / ref
            record["closed_form"] = {
                "value": ref,
                "relative_gap": gap,
                "agrees": gap <= self.context.calibration["closed_form_relative_tolerance"],
            }
        record["config"] = self.context.to_dict()
        path = self.context.output_path("json", "optimize.json")
        write_json(path, record)
        self._say(self.templates.optimization_summary(record, record["certificate"]))
        return EXIT_OK

    def cmd_experiment(self, kind: str) -> int:
        runner = ExperimentRunner(self.context, self.info_handler)
        _, summary = {"scan": runner.run_scan, "pairs": runner.run_pairs, "census": runner.run_census}[kind]()
        outputs = [self.context.output_path("csv", f"{kind}.csv"), self.context.output_path("json", f"{kind}.json")]
        self._say(self.templates.experiment_summary(summary, outputs))
        failed = failed_checks(summary.get("checks", {}))
        if failed:
            raise AcceptanceFailure(failed)
        return EXIT_OK

    def cmd_bounds(self, args) -> int:
        g = args.genus or self.context.genus
        x, b, m, n, s = args.x, args.b, args.m, args.n, args.s
        x_star, f_star = min_collar_plus_linear(b)
        body: Dict[str, Any] = {
            "x": x,
            "collar width r(x)": collar_width(x),
            f"f_{m}(x)": winding_length(m, x),
            f"f_{m + s}(x) - f_{m}(x)": winding_length(m + s, x) - winding_length(m, x),
            f"winding bound C({s}, x)": winding_difference_bound(m, s, x),
            "b": b,
            "argmin 2r(x/2)+bx": x_star,
            "min 2r(x/2)+bx": f_star,
            f"systole bound C({g})": systole_upper_bound(g),
            f"closed form ({g})": minimal_filling_closed_form(g),
        }
        if m >= 2:
            rep = build_representation(self.coords_from_args(args, g))
            bound = collar_lower_bound_terms(g, m, n, rep, int(self.context.get("systole_depth")))
            body[f"collar lower bound (m={m}, n={n})"] = bound.value
            body[f"length of gamma_{{{m},{n}}}"] = geodesic_length(rep, family_word(g, m, n))
            body["sys side 1"] = bound.sys1
            body["sys side 2"] = bound.sys2
        self._say(self.templates.bounds_report(body))
        return EXIT_OK


# ============================================================
#  PARSER
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--quiet", action="store_true")
    common.add_argument("--genus", type=int)

    word_args = argparse.ArgumentParser(add_help=False)
    word_args.add_argument("word", nargs="*", help='words like "a1 b1 A1 B1"')
    word_args.add_argument("--family", type=int, nargs=3, metavar=("G", "M", "N"))

    coords = argparse.ArgumentParser(add_help=False)
    coords.add_argument("--lengths", help="3g-3 cuff lengths, eta first")
    coords.add_argument("--twists", help="3g-3 twists")

    opt = argparse.ArgumentParser(add_help=False)
    opt.add_argument("--starts", type=int)
    opt.add_argument("--tol", type=float)
    opt.add_argument("--max-evals", type=int)
    opt.add_argument("--escape-threshold", type=float)

    parser = argparse.ArgumentParser(prog="main.py", description="filling curves toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("intersect", parents=[common, word_args])
    sub.add_parser("length", parents=[common, word_args, coords])
    p = sub.add_parser("optimize", parents=[common, word_args, opt])
    p.add_argument("--allow-nonfilling", action="store_true")
    p = sub.add_parser("scan", parents=[common, opt])
    p.add_argument("--m")
    p.add_argument("--n")
    p = sub.add_parser("pairs", parents=[common, opt])
    p.add_argument("--nmax", type=int)
    p = sub.add_parser("census", parents=[common, opt])
    p.add_argument("--max-mn", type=int)
    p.add_argument("--L", type=float)
    p = sub.add_parser("bounds", parents=[common, coords])
    p.add_argument("--x", type=float, default=0.5)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--s", type=int, default=1)
    return parser


def context_from_args(args) -> RunContext:
    """Дефолты < файл конфига < явные флаги."""
    ctx = RunContext.load(args.config)
    get = lambda name: getattr(args, name, None)
    ctx.apply_flags({
        "genus": get("genus"),
        "seed": get("seed"),
        "jobs": get("jobs"),
        "output.dir": get("out"),
        "optimizer.starts": get("starts"),
        "optimizer.tol": get("tol"),
        "optimizer.max_evals": get("max_evals"),
        "optimizer.escape_threshold": get("escape_threshold"),
        "scan.m": get("m") if args.command == "scan" else None,
        "scan.n": get("n") if args.command == "scan" else None,
        "scan.nmax": get("nmax"),
        "scan.max_mn": get("max_mn"),
        "scan.L": get("L"),
    })
    return ctx


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    info_handler = ErrorHandler(quiet=args.quiet)
    try:
        ctx = context_from_args(args)
        cli = ToolkitCli(ctx, info_handler)
        if args.command in ("scan", "pairs", "census"):
            return cli.cmd_experiment(args.command)
        return getattr(cli, f"cmd_{args.command}")(args)
    except ToolkitError as ex:
        print(f"🚨 {type(ex).__name__}: {ex}", file=sys.stderr)
        return exit_code_for(ex)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("💥 Force exit")
        sys.exit(130)
