"""Command-line front end.

Every report is a list of ``key: value`` lines.  Exit status: 0 accept
(or equal), 1 reject (or counterexample), 2 unknown, 64 usage error,
65 unreadable input.
"""
from __future__ import annotations

import argparse
import itertools
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import dcfg, monoids, transducer, two_stack, valence
from .brackets import AlphabetError, as_letter, parse_ranked_alphabet
from .search import Outcome, RunBudget, RunResult
from .terms import TermError, format_word

EX_USAGE, EX_DATAERR = 64, 65


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


# -- loading -----------------------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def detect_kind(text: str) -> str:
    """Guess the file kind from its declarations."""
    heads = set()
    has_arity = False
    for raw in text.splitlines():
        parts = raw.split("#", 1)[0].split()
        if parts:
            heads.add(parts[0])
            has_arity |= parts[0] == "sym" and "arity" in parts
    if heads & {"rule", "nonterm", "start"}:
        return "grammar"
    if "ptrans" in heads:
        return "pda"
    if "edge" in heads:
        return "valence"
    if heads & {"tedge", "tstate"}:
        return "transducer"
    if "trans" in heads:
        return "stsa" if has_arity else "gstsa"
    if "bracket" in heads:
        return "alphabet"
    raise InputError("cannot tell what kind of file this is")


_PARSERS = {
    "grammar": dcfg.parse_grammar,
    "pda": valence.parse_pda,
    "valence": valence.parse_valence,
    "stsa": two_stack.parse_stsa,
    "gstsa": two_stack.parse_gstsa,
    "transducer": transducer.parse_transducer,
    "alphabet": parse_ranked_alphabet,
}


def load(path: str, kind: Optional[str] = None):
    text = _read(path)
    kind = kind or detect_kind(text)
    try:
        obj = _PARSERS[kind](text)
        if kind == "grammar":
            problems = dcfg.validate_grammar(obj)
            if problems:
                raise dcfg.InvalidGrammar("; ".join(problems))
    except (ValueError, TermError) as exc:
        raise InputError(f"{path}: {exc}") from None
    return kind, obj


def alphabet_of(kind: str, obj) -> tuple:
    if kind == "grammar":
        return tuple(obj.alphabet)
    if kind == "transducer":
        return tuple(obj.output_alphabet)
    return tuple(obj.alphabet)


def parse_input_word(text: str, alphabet: Sequence[str]) -> tuple:
    """Space-separated tokens, or one character per letter for bare strings."""
    if any(c.isspace() for c in text):
        return tuple(text.split())
    if text in alphabet and len(text) > 1:
        return (text,)
    return tuple(text)


def _budget(args) -> RunBudget:
    try:
        return RunBudget(args.max_configs, args.max_stack, args.max_silent)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def membership(kind: str, obj, budget: RunBudget) -> Callable[[tuple], RunResult]:
    if kind == "grammar":
        return lambda w: RunResult(Outcome.ACCEPT if dcfg.recognize(obj, w) else Outcome.REJECT)
    if kind == "valence":
        return lambda w: valence.run_valence(obj, w, budget)
    if kind == "pda":
        return lambda w: valence.run_lookup_pda(obj, w, budget)
    if kind in ("stsa", "gstsa"):
        return lambda w: two_stack.run_stsa(obj, w, budget)
    raise UsageError(f"a {kind} file does not define a language to test")


def _report(pairs) -> None:
    for key, value in pairs:
        print(f"{key}: {value}")


def _outcome_lines(result: RunResult) -> list:
    out = [("outcome", result.outcome.value)]
    if result.binding and result.outcome is Outcome.UNKNOWN:
        out.append(("binding", result.binding))
    if result.configurations:
        out.append(("configurations", result.configurations))
    return out


# -- subcommands ---------------------------------------------------------------------------------

def cmd_check(args) -> int:
    for kind in ("grammar", "stsa", "gstsa", "valence", "pda"):
        path = getattr(args, kind)
        if path:
            break
    _, obj = load(path, kind)
    word = parse_input_word(args.word, alphabet_of(kind, obj))
    result = membership(kind, obj, _budget(args))(word)
    lines = _outcome_lines(result)
    if args.trace and result.accepted:
        if kind == "grammar":
            d = dcfg.derive(obj, word)
            lines += [("steps", " ".join(map(str, d.steps))), ("term", d.term),
                      ("value", format_word(d.value, " " if any(len(x) > 1 for x in word) else ""))]
        else:
            rerun = _rerun_with_witness(kind, obj, word, _budget(args))
            for n, (t, config) in enumerate(rerun.witness[1:], 1):
                lines.append((f"step{n}", _describe_step(t, config)))
    _report(lines)
    return result.outcome.exit_code


def _rerun_with_witness(kind, obj, word, budget) -> RunResult:
    if kind == "valence":
        return valence.run_valence(obj, word, budget, witness=True)
    if kind == "pda":
        return valence.run_lookup_pda(obj, word, budget, witness=True)
    return two_stack.run_stsa(obj, word, budget, witness=True)


def _describe_step(t, config) -> str:
    state, pos, _ = config
    if isinstance(t, valence.ValenceEdge):
        what = valence.format_element(t.element)
    elif isinstance(t, valence.PdaTransition):
        what = f"{t.op} {valence.render(t.stack_symbol)}"
    else:
        what = " ".join([t.op] + [valence.render(s) for s in t.symbols])
    return f"{t.symbol or '_'} {what} -> {valence.render(state)} @{pos}"


def cmd_enumerate(args) -> int:
    _, g = load(args.grammar, "grammar")
    words = dcfg.enumerate_language(g, args.max_len)
    spaced = any(len(a) > 1 for a in g.alphabet)
    lines = [("count", len(words))]
    for w in sorted(words, key=lambda w: (len(w), w)):
        lines.append(("word", format_word(w, " " if spaced else "") if w else '""'))
    _report(lines)
    return 0


def cmd_derive(args) -> int:
    _, g = load(args.grammar, "grammar")
    word = parse_input_word(args.word, g.alphabet)
    try:
        d = dcfg.derive(g, word, args.max_steps)
    except dcfg.DerivationBudgetExhausted as exc:
        _report([("outcome", "unknown"), ("binding", "max_steps"), ("detail", exc)])
        return 2
    if d is None:
        _report([("outcome", "reject")])
        return 1
    _report([("outcome", "accept"), ("steps", " ".join(map(str, d.steps))),
             ("rules", dcfg.format_derivation(g, d)), ("term", d.term),
             ("value", format_word(d.value, " " if any(len(x) > 1 for x in word) else ""))])
    return 0


def cmd_validate_dyck(args) -> int:
    _, x = load(args.alphabet, "alphabet")
    word = tuple(args.word.split())
    try:
        letters = [as_letter(tok) for tok in word]
    except AlphabetError as exc:
        raise InputError(str(exc)) from None
    if not all(x.contains(a) for a in letters):
        raise InputError("word uses letters outside the alphabet")
    lines = []
    if args.method == "monoid":
        ok = monoids.is_dyck_by_monoid(word, x)
        lines.append(("element", monoids.sx_reduce(word, x)))
    elif args.method == "partition":
        blocks = monoids.dyck_partition(word, x)
        ok = blocks is not None
        if ok:
            lines.append(("partition", " ".join("{" + ",".join(map(str, b)) + "}" for b in blocks)))
    else:
        ok = dcfg.recognize(dcfg.build_dyck_grammar(x), word)
    _report([("outcome", "accept" if ok else "reject")] + lines)
    return 0 if ok else 1


def cmd_validate_garland(args) -> int:
    try:
        w = two_stack.parse_garland(args.word)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    check = two_stack.is_k_garland(w, args.k)
    lines = [("outcome", "accept" if check else "reject"), ("reason", check.reason)]
    if check:
        lines.append(("longest_chain", check.longest_chain))
        cycles = two_stack.extract_garland_cycles(w, args.k)
        lines.append(("cycles", " ".join("(" + ",".join(map(str, c)) + ")" for c in cycles)))
    _report(lines)
    return 0 if check else 1


def cmd_convert(args) -> int:
    if args.keep_desugar:
        kind, m = load(args.keep_desugar)
        if kind not in ("stsa", "gstsa"):
            raise UsageError("--keep-desugar expects a two-stack machine")
        text = two_stack.format_machine(two_stack.desugar_keep(m))
    elif args.eliminate_lookup:
        kind, m = load(args.eliminate_lookup)
        if kind == "pda":
            text = valence.format_pda(valence.eliminate_lookup_pda(m))
        elif kind == "gstsa":
            text = two_stack.format_machine(two_stack.eliminate_lookup_gstsa(m))
        else:
            raise UsageError("--eliminate-lookup expects a pushdown automaton or a GSTSA")
    elif args.pda_to_valence:
        _, m = load(args.pda_to_valence, "pda")
        try:
            text = valence.format_valence(valence.pda_to_valence(m))
        except valence.MachineError as exc:
            raise UsageError(str(exc)) from None
    else:
        _, m = load(args.stsa_to_gstsa, "stsa")
        text = two_stack.format_machine(two_stack.stsa_to_gstsa(two_stack.desugar_keep(m)))
    if args.output:
        Path(args.output).write_text(text)
        _report([("written", args.output)])
    else:
        sys.stdout.write(text)
    return 0


def words_up_to(alphabet: Sequence[str], max_len: int):
    """All words in length-lexicographic order."""
    alphabet = sorted(alphabet)
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def crossvalidate(left, right, alphabet: Sequence[str], max_len: int) -> dict:
    """Compare two membership functions on every word up to ``max_len``."""
    checked = 0
    for w in words_up_to(alphabet, max_len):
        a, b = left(w), right(w)
        checked += 1
        if Outcome.UNKNOWN in (a.outcome, b.outcome):
            return {"result": "unknown", "word": w, "left": a.outcome.value,
                    "right": b.outcome.value, "checked": checked}
        if a.outcome is not b.outcome:
            return {"result": "counterexample", "word": w, "left": a.outcome.value,
                    "right": b.outcome.value, "checked": checked}
    return {"result": "equal", "checked": checked}


def cmd_crossvalidate(args) -> int:
    budget = _budget(args)
    lk, lobj = load(args.left)
    rk, robj = load(args.right)
    alphabet = sorted(set(alphabet_of(lk, lobj)) | set(alphabet_of(rk, robj)))
    if args.alphabet:
        alphabet = args.alphabet.split()
    report = crossvalidate(membership(lk, lobj, budget), membership(rk, robj, budget),
                           alphabet, args.max_len)
    lines = [("result", report["result"]), ("checked", report["checked"])]
    if "word" in report:
        spaced = any(len(a) > 1 for a in alphabet)
        w = report["word"]
        lines += [("word", (" " if spaced else "").join(w) if w else '""'),
                  ("left", report["left"]), ("right", report["right"])]
    _report(lines)
    return {"equal": 0, "counterexample": 1, "unknown": 2}[report["result"]]


def cmd_image(args) -> int:
    _, t = load(args.transducer, "transducer")
    if args.grammar:
        _, g = load(args.grammar, "grammar")
        source = dcfg.enumerate_language(g, args.source_len)
    else:
        _, x = load(args.alphabet, "alphabet")
        letters = [str(a) for a in x.letters()]
        source = [w for w in words_up_to(letters, args.source_len) if monoids.is_dyck_by_monoid(w, x)]
    try:
        image = transducer.image_up_to(t, source, args.max_len)
    except transducer.TransducerError as exc:
        raise InputError(str(exc)) from None
    spaced = any(len(a) > 1 for a in t.output_alphabet)
    lines = [("count", len(image))]
    for v in sorted(image, key=lambda v: (len(v), v)):
        lines.append(("word", (" " if spaced else "").join(v) if v else '""'))
    _report(lines)
    return 0


# -- entry point -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="displacement", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def budgets(sp):
        sp.add_argument("--max-configs", type=int, default=RunBudget.max_configurations)
        sp.add_argument("--max-stack", type=int, default=None)
        sp.add_argument("--max-silent", type=int, default=RunBudget.max_silent_steps)

    sp = sub.add_parser("check", help="decide membership of a word")
    which = sp.add_mutually_exclusive_group(required=True)
    for kind in ("grammar", "stsa", "gstsa", "valence", "pda"):
        which.add_argument(f"--{kind}", metavar="FILE")
    sp.add_argument("--word", required=True)
    sp.add_argument("--trace", action="store_true", help="print a derivation or accepting run")
    budgets(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("enumerate", help="list the words of a grammar up to a length")
    sp.add_argument("--grammar", required=True, metavar="FILE")
    sp.add_argument("--max-len", type=int, required=True)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("derive", help="shortest derivation of a word")
    sp.add_argument("--grammar", required=True, metavar="FILE")
    sp.add_argument("--word", required=True)
    sp.add_argument("--max-steps", type=int, default=10_000)
    sp.set_defaults(func=cmd_derive)

    sp = sub.add_parser("validate-dyck", help="test a multibracket word")
    sp.add_argument("--alphabet", required=True, metavar="FILE")
    sp.add_argument("--word", required=True)
    sp.add_argument("--method", choices=("monoid", "partition", "grammar"), default="monoid")
    sp.set_defaults(func=cmd_validate_dyck)

    sp = sub.add_parser("validate-garland", help="test a word of bracket pairs")
    sp.add_argument("--word", required=True, help="pairs like \"a,a a',b\"")
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_validate_garland)

    sp = sub.add_parser("convert", help="apply a machine construction")
    which = sp.add_mutually_exclusive_group(required=True)
    for flag in ("--keep-desugar", "--eliminate-lookup", "--pda-to-valence", "--stsa-to-gstsa"):
        which.add_argument(flag, metavar="FILE")
    sp.add_argument("-o", "--output", metavar="FILE")
    sp.set_defaults(func=cmd_convert)

    sp = sub.add_parser("crossvalidate", help="compare two languages on all short words")
    sp.add_argument("--left", required=True, metavar="FILE")
    sp.add_argument("--right", required=True, metavar="FILE")
    sp.add_argument("--max-len", type=int, required=True)
    sp.add_argument("--alphabet", help="space-separated letters (default: union of both)")
    budgets(sp)
    sp.set_defaults(func=cmd_crossvalidate)

    sp = sub.add_parser("image", help="apply a transducer to a language")
    sp.add_argument("--transducer", required=True, metavar="FILE")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--grammar", metavar="FILE")
    src.add_argument("--alphabet", metavar="FILE", help="use the Dyck language of a ranked alphabet")
    sp.add_argument("--max-len", type=int, required=True)
    sp.add_argument("--source-len", type=int, help="source words up to this length (default: --max-len)")
    sp.set_defaults(func=cmd_image)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "source_len", 0) is None:
        args.source_len = args.max_len
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DATAERR
    except dcfg.ForeignSymbol as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
