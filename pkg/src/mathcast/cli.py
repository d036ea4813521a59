"""Command-line interface: ``mathcast parse|translate|verify|moi|bench|emit-script|lexicon``.

Results go to stdout as JSON (``--pretty`` indents them, or prints a table
where that reads better); diagnostics go to stderr.  Exit status is 0 on
success, 1 for bad input and 2 for internal errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .benchmark import MODES, evaluate_pipeline, load_gold
from .cas_translate import canonical_target, translate
from .disambiguation import context_bindings, resolve, to_semantic_latex, zero_arity_names
from .errors import LatexError, MathcastError
from .expr import to_dict, to_sexpr
from .latex_parser import parse_latex, render_latex
from .lexicon import (ContentDictionary, load_lexicon, load_seed_lexicon, lookup_by_keywords,
                      lookup_by_macro)
from .moi import (formulas_from_tex, index_corpus, load_index, rank_frequency, save_index,
                  stop_expressions, top_terms, zipf_fit)
from .verify import SamplingConfig, emit_cas_script, equations_from_document, verify_equations


class UsageError(Exception):
    pass


@dataclass
class Config:
    lexicon_path: str | None = None
    default_target: str = "Mathematica"
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    strict_parse: bool = True


def load_config(path: str | None) -> Config:
    """Read a TOML config; ``MATHCAST_LEXICON`` overrides its ``lexicon_path``."""
    cfg = Config()
    if path:
        with open(path, "rb") as fh:
            try:
                data = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise MathcastError(f"{path}: {exc}") from None
        known = {"lexicon_path", "default_target", "strict_parse", "sampling"}
        extra = sorted(set(data) - known)
        if extra:
            raise MathcastError(f"{path}: unknown config key {extra[0]!r}")
        cfg.lexicon_path = data.get("lexicon_path", cfg.lexicon_path)
        cfg.default_target = canonical_target(data.get("default_target", cfg.default_target))
        cfg.strict_parse = bool(data.get("strict_parse", cfg.strict_parse))
        s = data.get("sampling", {})
        try:
            cfg.sampling = SamplingConfig(
                points_per_variable=int(s.get("points_per_variable", 10)),
                real_range=tuple(s.get("real_range", (0.1, 0.9))),
                integer_range=tuple(s.get("integer_range", (1, 10))),
                seed=int(s.get("seed", 0)),
                pole_epsilon=float(s.get("pole_epsilon", 1e-6)),
            )
        except (TypeError, ValueError) as exc:
            raise MathcastError(f"{path}: invalid sampling settings: {exc}") from None
    env = os.environ.get("MATHCAST_LEXICON")
    if env:
        cfg.lexicon_path = env
    return cfg


def _lexicon(cfg: Config, override: str | None) -> ContentDictionary:
    path = override or cfg.lexicon_path
    return load_lexicon(path) if path else load_seed_lexicon()


def _emit(obj, pretty: bool):
    print(json.dumps(obj, indent=2 if pretty else None, ensure_ascii=False))


def _sampling(cfg: Config, args) -> SamplingConfig:
    s = cfg.sampling
    seed = args.seed if getattr(args, "seed", None) is not None else s.seed
    points = args.points if getattr(args, "points", None) is not None else s.points_per_variable
    return SamplingConfig(points, s.real_range, s.integer_range, seed, s.pole_epsilon)


# -- subcommands ------------------------------------------------------------------------


def cmd_parse(args, cfg: Config) -> int:
    strict = cfg.strict_parse and not args.lenient
    expr = parse_latex(args.latex, strict=strict)
    out = {"latex": render_latex(expr), "tree": to_dict(expr)}
    if args.sexpr:
        out["sexpr"] = to_sexpr(expr)
    _emit(out, args.pretty)
    return 0


def cmd_translate(args, cfg: Config) -> int:
    lexicon = _lexicon(cfg, args.lexicon)
    target = canonical_target(args.target or cfg.default_target)
    bindings = {}
    if args.context:
        bindings = context_bindings(Path(args.context).read_text(encoding="utf-8"), lexicon)
    expr = parse_latex(args.latex, strict=cfg.strict_parse and not args.lenient,
                       known_macros=zero_arity_names(lexicon))
    resolved = resolve(expr, bindings)
    result = translate(resolved, target, lexicon)
    out = result.to_json()
    out["semantic"] = to_semantic_latex(resolved, lexicon)
    out["bindings"] = {k: m.name for k, m in sorted(bindings.items())}
    _emit(out, args.pretty)
    return 0


def cmd_verify(args, cfg: Config) -> int:
    lexicon = _lexicon(cfg, args.lexicon)
    text = Path(args.file).read_text(encoding="utf-8")
    reports = [r.to_json() for r in verify_equations(equations_from_document(text, lexicon),
                                                     _sampling(cfg, args))]
    if args.report:
        Path(args.report).write_text(json.dumps(reports, indent=2, ensure_ascii=False) + "\n",
                                     encoding="utf-8")
    if args.pretty:
        for r in reports:
            print(f"{r['id']}\t{r['outcome']}\t{r['samples_tested']}\t{r['max_residual']:.3g}")
    else:
        _emit(reports, False)
    return 0


def cmd_moi_index(args, cfg: Config) -> int:
    root = Path(args.dir)
    if not root.is_dir():
        raise FileNotFoundError(f"not a directory: {root}")
    docs, skipped = [], 0
    for path in sorted(root.rglob("*.tex")):
        exprs = []
        for snippet in formulas_from_tex(path.read_text(encoding="utf-8")):
            try:
                exprs.append(parse_latex(snippet, strict=False))
            except LatexError:
                skipped += 1
        docs.append((path.relative_to(root).as_posix(), exprs))
    index = index_corpus(docs, max_nodes=args.max_nodes)
    save_index(index, args.out)
    if skipped:
        print(f"warning: skipped {skipped} unparseable formula(s)", file=sys.stderr)
    _emit({"index": str(args.out), "doc_count": index.doc_count,
           "records": len(index.records), "skipped": skipped}, args.pretty)
    return 0


def cmd_moi_top(args, cfg: Config) -> int:
    index = load_index(args.index)
    if args.doc:
        rows = [(c, f"{s:.6f}") for c, s in top_terms(index, args.doc, args.k)]
    else:
        rows = [(c, str(n), str(index.records[c].df)) for c, n in rank_frequency(index)[:args.k]]
    for row in rows:
        print("\t".join(row))
    return 0


def cmd_moi_stop(args, cfg: Config) -> int:
    index = load_index(args.index)
    for canon in stop_expressions(index, args.k):
        print(f"{canon}\t{index.records[canon].df}")
    return 0


def cmd_moi_zipf(args, cfg: Config) -> int:
    slope, r2 = zipf_fit(load_index(args.index))
    print(f"slope\t{slope:.6f}")
    print(f"r_squared\t{r2:.6f}")
    return 0


def cmd_bench(args, cfg: Config) -> int:
    lexicon = _lexicon(cfg, args.lexicon)
    entries = load_gold(args.gold, zero_arity_names(lexicon))
    if not entries:
        raise MathcastError(f"{args.gold}: no gold entries")
    target = canonical_target(args.target or cfg.default_target)
    modes = MODES if args.mode == "both" else (args.mode,)
    sampling = _sampling(cfg, args)
    metrics = {m: evaluate_pipeline(entries, lexicon, m, target, sampling).to_json(args.entries)
               for m in modes}
    out = {"target": target, "metrics": metrics}
    if args.out:
        Path(args.out).write_text(json.dumps(out, indent=2, ensure_ascii=False) + "\n",
                                  encoding="utf-8")
    if args.pretty:
        print("mode\taccuracy\tverified\tfailed\tinconclusive")
        for m, v in metrics.items():
            print(f"{m}\t{v['translation_accuracy']:.3f}\t{v['verified_rate']:.3f}\t"
                  f"{v['failed_rate']:.3f}\t{v['inconclusive_rate']:.3f}")
    else:
        _emit(out, False)
    return 0


def cmd_emit_script(args, cfg: Config) -> int:
    lexicon = _lexicon(cfg, args.lexicon)
    target = canonical_target(args.target or cfg.default_target)
    text = Path(args.file).read_text(encoding="utf-8")
    script = emit_cas_script(equations_from_document(text, lexicon), target, lexicon,
                             _sampling(cfg, args))
    if args.out:
        Path(args.out).write_text(script, encoding="utf-8")
        _emit({"script": str(args.out), "target": target}, args.pretty)
    else:
        sys.stdout.write(script)
    return 0


def cmd_lexicon(args, cfg: Config) -> int:
    lexicon = _lexicon(cfg, args.lexicon)
    if args.macro:
        _emit(lookup_by_macro(lexicon, args.macro).to_json(), args.pretty)
    elif args.keywords:
        ranked = lookup_by_keywords(lexicon, args.keywords)
        _emit([{"macro": m.name, "score": s} for m, s in ranked], args.pretty)
    else:
        _emit({"version": lexicon.version, "source": lexicon.source,
               "macros": [m.name for m in lexicon]}, args.pretty)
    return 0


# -- argument parsing -----------------------------------------------------------------


def _missing_subcommand(parser: argparse.ArgumentParser) -> int:
    parser.print_help(sys.stderr)
    return 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="TOML config file")
    common.add_argument("--lexicon", help="JSON-lines lexicon (default: bundled seed lexicon)")
    common.add_argument("--pretty", action="store_true", help="human-readable output")

    parser = _Parser(prog="mathcast", description="Parse, disambiguate, translate and verify LaTeX math.")
    parser.add_argument("--version", action="version", version=f"mathcast {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{parse,translate,verify,moi,bench,emit-script,lexicon}",
                                parser_class=_Parser)

    p = sub.add_parser("parse", parents=[common], help="parse LaTeX and print the tree")
    p.add_argument("latex")
    p.add_argument("--lenient", action="store_true", help="keep unknown macros as MacroCall nodes")
    p.add_argument("--sexpr", action="store_true", help="include the S-expression form")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("translate", parents=[common], help="translate LaTeX to a CAS syntax")
    p.add_argument("latex")
    p.add_argument("--target", help="Mathematica, Maple or SymPyText (case-insensitive)")
    p.add_argument("--context", help="LaTeX document whose definitions bind symbols")
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("verify", parents=[common], help="numerically verify the equations of a .tex file")
    p.add_argument("file")
    p.add_argument("--seed", type=int)
    p.add_argument("--points", type=int, help="sample points per variable")
    p.add_argument("--report", help="also write the report JSON here")
    p.set_defaults(func=cmd_verify)

    moi = sub.add_parser("moi", help="mathematical objects of interest")
    moi.set_defaults(func=lambda args, cfg: _missing_subcommand(moi))
    msub = moi.add_subparsers(dest="moi_command", metavar="{index,top,stop,zipf}", parser_class=_Parser)
    p = msub.add_parser("index", parents=[common], help="index the .tex files of a directory")
    p.add_argument("dir")
    p.add_argument("--out", default="moi-index.json")
    p.add_argument("--max-nodes", type=int, default=30)
    p.set_defaults(func=cmd_moi_index)
    p = msub.add_parser("top", parents=[common], help="most frequent subexpressions, or top TF-IDF of one document")
    p.add_argument("--index", default="moi-index.json")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--doc", help="rank by TF-IDF within this document")
    p.set_defaults(func=cmd_moi_top)
    p = msub.add_parser("stop", parents=[common], help="math stop expressions (highest document frequency)")
    p.add_argument("--index", default="moi-index.json")
    p.add_argument("--k", type=int, default=10)
    p.set_defaults(func=cmd_moi_stop)
    p = msub.add_parser("zipf", parents=[common], help="fit log frequency against log rank")
    p.add_argument("--index", default="moi-index.json")
    p.set_defaults(func=cmd_moi_zipf)

    p = sub.add_parser("bench", parents=[common], help="evaluate the pipeline on a gold TSV file")
    p.add_argument("gold")
    p.add_argument("--target")
    p.add_argument("--mode", choices=MODES + ("both",), default="both")
    p.add_argument("--out", help="also write the metrics JSON here")
    p.add_argument("--entries", action="store_true", help="include per-entry results")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("emit-script", parents=[common], help="write a CAS check script for a .tex file")
    p.add_argument("file")
    p.add_argument("--target")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_emit_script)

    p = sub.add_parser("lexicon", parents=[common], help="inspect the content dictionary")
    p.add_argument("--macro", help="show one macro")
    p.add_argument("--keywords", nargs="+", help="rank macros by keyword overlap")
    p.set_defaults(func=cmd_lexicon)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            parser.print_help(sys.stderr)
            return 1
        cfg = load_config(getattr(args, "config", None))
        return args.func(args, cfg)
    except SystemExit as exc:  # --help and --version
        return exc.code if isinstance(exc.code, int) else 1
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: IoError: {exc}", file=sys.stderr)
        return 1
    except (MathcastError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
