"""Command-line front end.

Exit codes: 0 success (positive verdict), 1 negative or refuted verdict,
2 usage or input error, 3 resource budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .graphs import FormatError, PRGraph, all_words, canonical_word, parse_graph, parse_word, path_graph
from .solver import EvalConfig, ResourceExhausted

OK, NEGATIVE, USAGE, EXHAUSTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _template(word: str | None, path: str | None) -> PRGraph:
    if (word is None) == (path is None):
        raise UsageError("give exactly one of a template word or a template file")
    if word is not None:
        return path_graph(parse_word(word))
    return parse_graph(_read(path))


def _config(args) -> EvalConfig:
    threads = max(1, args.threads)
    return EvalConfig(node_limit=getattr(args, "limit", None), parallel=threads > 1, threads=threads)


class _Out:
    """Collects either human lines or a JSON document."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.doc: dict = {}
        self.lines: list[str] = []

    def line(self, text: str = ""):
        self.lines.append(text)

    def flush(self, stream):
        if self.as_json:
            stream.write(json.dumps(self.doc, indent=2, sort_keys=True) + "\n")
        else:
            stream.write("\n".join(self.lines) + ("\n" if self.lines else ""))


# --- subcommands -------------------------------------------------------------


def cmd_classify(args, out: _Out) -> int:
    from .classify import classify_forest, classify_path

    if (args.path is None) == (args.tree is None):
        raise UsageError("classify needs exactly one of --path or --tree")
    if args.path is not None:
        verdict = classify_path(parse_word(args.path))
    else:
        verdict = classify_forest(parse_graph(_read(args.tree)))
    doc = verdict.to_json()
    out.doc = doc
    out.line(f"class: {doc['class']}")
    out.line(f"reason: {doc['reason']}")
    for k, v in doc["parameters"].items():
        out.line(f"  {k} = {v}")
    if doc.get("note"):
        out.line(f"note: {doc['note']}")
    return OK


def cmd_eval(args, out: _Out) -> int:
    from .logic import parse_sentence
    from .solver import evaluate

    template = _template(args.template, args.template_file)
    sentence = parse_sentence(_read(args.sentence))
    try:
        value = evaluate(sentence, template, _config(args))
    except ResourceExhausted:
        out.doc = {"result": "exhausted"}
        out.line("exhausted")
        return EXHAUSTED
    out.doc = {"result": value}
    out.line("true" if value else "false")
    return OK if value else NEGATIVE


def cmd_reduce(args, out: _Out) -> int:
    from .logic import print_sentence
    from .nae import qnae_true
    from .reduce import (anchor_report, choose_recipe, clause_gadget, compile_instance,
                         fit_clause, gadget_extension_check, nae_table, normalize, parse_qnae)
    from .solver import evaluate

    word = parse_word(args.template)
    template = path_graph(word)
    inst = normalize(parse_qnae(_read(args.nae)))
    recipe = choose_recipe(word)
    sentence = compile_instance(inst, recipe, template)
    text = print_sentence(sentence)
    if args.emit and args.emit != "-":
        Path(args.emit).write_text(text)
    elif not args.check:
        out.lines.append(text.rstrip("\n"))
    out.doc = {"recipe": recipe.summary(), "variables": len(sentence.prefix),
               "atoms": len(sentence.atoms)}
    out.line(f"recipe: {recipe.case} pattern={recipe.pattern} selector={recipe.selector}")
    out.line(f"sentence: {len(sentence.prefix)} variables, {len(sentence.atoms)} atoms")
    if not args.check:
        return OK

    fit = fit_clause(recipe, template)
    gadget_ok = gadget_extension_check(clause_gadget(recipe, template, fit), recipe, template) == nae_table()
    report = anchor_report(recipe, template)
    oracle = qnae_true(inst.prefix, inst.clauses)
    try:
        compiled = evaluate(sentence, template, _config(args))
    except ResourceExhausted:
        out.doc["check"] = {"compiled": "exhausted"}
        out.line("compiled: exhausted")
        return EXHAUSTED
    agree = compiled == oracle
    out.doc["check"] = {"oracle": oracle, "compiled": compiled, "agree": agree,
                        "gadget_exact": gadget_ok, "anchors_sound": report.sound}
    out.line(f"{'oracle':<16}{'compiled':<16}{'agree':<8}")
    out.line(f"{str(oracle):<16}{str(compiled):<16}{str(agree):<8}")
    out.line(f"clause gadget exact: {gadget_ok}")
    out.line(f"anchor selectors: forces={report.forces_anchors} never_stuck={report.never_stuck}")
    return OK if agree else NEGATIVE


def cmd_poly(args, out: _Out) -> int:
    from .graphs import RootedTree
    from .polymorph import (f0_table, f1_table, is_majority, is_polymorphism, median_table,
                            search_majority_polymorphism)

    g = _template(args.graph, args.graph_file)
    if bool(args.construct) == bool(args.search):
        raise UsageError("poly needs exactly one of --construct or --search")
    if args.construct:
        if args.construct == "f0":
            leaves = [v for v in range(g.n) if g.degree(v) <= 1]
            if not leaves:
                raise UsageError("f0 needs a tree with a leaf")
            table = f0_table(RootedTree(g, leaves[0]))
        elif args.construct == "f1":
            table = f1_table(g)
        else:
            table = median_table(g)
        ok = is_majority(table) and is_polymorphism(table, g)
        out.doc = {"construction": args.construct, "verified": ok, "n": table.n}
        out.lines.append(table.dump().rstrip("\n"))
        out.line(f"verified majority polymorphism: {ok}")
        return OK if ok else NEGATIVE
    result = search_majority_polymorphism(g, node_budget=args.budget)
    out.doc = {"status": result.status}
    out.line(result.status)
    if result.found:
        out.lines.append(result.result.dump().rstrip("\n"))
        return OK
    return NEGATIVE if result.status == "refuted" else EXHAUSTED


def cmd_surject(args, out: _Out) -> int:
    from .graphs import is_surjective_homomorphism
    from .surject import (equivalence_witness_path, format_matrix, surhom2_labels, surhom2_matrix,
                          surhom_labels, surhom_matrix)

    if args.witness is not None:
        if args.lemma:
            raise UsageError("--witness and --lemma are exclusive")
        w = equivalence_witness_path(parse_word(args.witness), method=args.method)
        ok = w.verify()
        out.doc = {"witness": w.summary(), "verified": ok, "core": canonical_word(_word_of(w.core))}
        out.line(f"core: {_word_of(w.core)}")
        for k, v in w.summary().items():
            out.line(f"  {k} = {v}")
        out.line(f"verified: {ok}")
        return OK if ok else NEGATIVE
    if args.lemma == "surhom":
        if args.m is None:
            raise UsageError("surhom needs --m")
        f, rows = surhom_matrix(args.m), surhom_labels(args.m)
    elif args.lemma == "surhom2":
        if args.a is None or args.b is None:
            raise UsageError("surhom2 needs --a and --b")
        f, rows = surhom2_matrix(args.a, args.b), surhom2_labels(args.a, args.b)
    else:
        raise UsageError("surject needs --lemma or --witness")
    ok = is_surjective_homomorphism(f)
    out.doc = {"matrix": [[str(x) for x in row] for row in rows], "verified": ok}
    out.lines.append(format_matrix(rows).rstrip("\n"))
    out.line(f"surjective homomorphism: {ok}")
    return OK if ok else NEGATIVE


def _word_of(g: PRGraph) -> str:
    from .graphs import path_order, path_word

    return path_word(g, path_order(g))


def survey(max_len: int, audit: bool) -> dict:
    """Verdict for every path word up to ``max_len``; optional case audit."""
    from .classify import classify_path, is_zero_eccentric
    from .reduce import choose_recipe

    rows, unmatched = [], []
    for word in all_words(max_len):
        v = classify_path(word, witness=False)
        rows.append({"word": word, "class": v.cls, "reason": v.reason})
        if audit and not is_zero_eccentric(word):
            recipe = choose_recipe(word)
            if recipe.fallback:
                mu = recipe.values["mu"]
                unmatched.append({"word": word, "class": v.cls, "mu": mu, "ok": mu > 1})
    doc = {"max_len": max_len, "words": len(rows), "rows": rows}
    if audit:
        doc["unmatched"] = unmatched
    return doc


def cmd_survey(args, out: _Out) -> int:
    if args.paths_up_to < 1:
        raise UsageError("--paths-up-to must be positive")
    doc = survey(args.paths_up_to, args.audit_cases)
    out.doc = doc
    counts: dict = {}
    for row in doc["rows"]:
        counts[row["class"]] = counts.get(row["class"], 0) + 1
        out.line(f"{row['word']:<{args.paths_up_to}}  {row['class']:<16}{row['reason']}")
    out.line(f"{doc['words']} words: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())))
    if not args.audit_cases:
        return OK
    bad = [u for u in doc["unmatched"] if not u["ok"]]
    out.line(f"unmatched non-0-eccentric words: {len(doc['unmatched'])}")
    for u in doc["unmatched"]:
        out.line(f"  {u['word']:<{args.paths_up_to}}  {u['class']}  mu={u['mu']}")
    return NEGATIVE if bad else OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="seed for any randomised step")
    common.add_argument("--threads", type=int, default=1, help="worker threads for evaluation")

    p = argparse.ArgumentParser(prog="qcsp-forests", description="QCSP dichotomy toolkit for partially reflexive forests")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="complexity verdict for a path or forest")
    c.add_argument("--path", metavar="WORD")
    c.add_argument("--tree", metavar="FILE")
    c.set_defaults(run=cmd_classify)

    e = sub.add_parser("eval", parents=[common], help="evaluate a positive Horn sentence")
    e.add_argument("--template", metavar="WORD")
    e.add_argument("--template-file", metavar="FILE")
    e.add_argument("--sentence", metavar="FILE", required=True)
    e.add_argument("--limit", type=int, default=None, help="search node budget")
    e.set_defaults(run=cmd_eval)

    r = sub.add_parser("reduce", parents=[common], help="compile a QNAE instance")
    r.add_argument("--template", metavar="WORD", required=True)
    r.add_argument("--nae", metavar="FILE", required=True)
    r.add_argument("--emit", metavar="FILE", help="where to write the sentence ('-' for stdout)")
    r.add_argument("--check", action="store_true", help="compare against the QNAE oracle")
    r.add_argument("--limit", type=int, default=None)
    r.set_defaults(run=cmd_reduce)

    m = sub.add_parser("poly", parents=[common], help="majority polymorphisms")
    m.add_argument("--graph", metavar="WORD")
    m.add_argument("--graph-file", metavar="FILE")
    m.add_argument("--construct", choices=["f0", "f1", "median"])
    m.add_argument("--search", action="store_true")
    m.add_argument("--budget", type=int, default=200_000)
    m.set_defaults(run=cmd_poly)

    s = sub.add_parser("surject", parents=[common], help="surjective homomorphisms from squares")
    s.add_argument("--lemma", choices=["surhom", "surhom2"])
    s.add_argument("--m", type=int)
    s.add_argument("--a", type=int)
    s.add_argument("--b", type=int)
    s.add_argument("--witness", metavar="WORD")
    s.add_argument("--method", choices=["auto", "unbalanced", "eccentric"], default="auto",
                   help="which core the witness targets")
    s.set_defaults(run=cmd_surject)

    v = sub.add_parser("survey", parents=[common], help="classify every path word up to a length")
    v.add_argument("--paths-up-to", type=int, required=True, metavar="N")
    v.add_argument("--audit-cases", action="store_true")
    v.set_defaults(run=cmd_survey)
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    random.seed(args.seed)
    out = _Out(args.json)
    try:
        code = args.run(args, out)
    except (UsageError, FormatError, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return USAGE
    except ResourceExhausted:
        stderr.write("resource budget exhausted\n")
        return EXHAUSTED
    out.flush(stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
