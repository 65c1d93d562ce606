"""Acceptance gate: one PASS/FAIL line per criterion.

Each expected value comes from an oracle that does not share code with the
implementation under test (string slicing, regular expressions, hand
traces, or a second independent decision procedure).
"""
import itertools
import random
import re


from displacement import dcfg, monoids, two_stack, valence
from displacement.brackets import RankedAlphabet
from displacement.cli import crossvalidate
from displacement.search import Outcome
from displacement.two_stack import KEEP

from machines import anbn_depth2_pda, g1_gstsa, g2_gstsa, sighted_gstsa


def report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")


def words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


# -- 1 -----------------------------------------------------------------------------------------

DYCK_ALPHABETS = [{"x": 2}, {"x": 3}, {"x": 2, "y": 1}]


def test_criterion_1_dyck_triple_agreement(capsys):
    disagreements = []
    totals = []
    for arities in DYCK_ALPHABETS:
        x = RankedAlphabet(arities)
        g = dcfg.build_dyck_grammar(x)
        letters = [str(a) for a in x.letters()]
        checked = accepted = 0
        for w in words(letters, 8):
            m = monoids.is_dyck_by_monoid(w, x)
            p = monoids.is_dyck_by_partition(w, x)
            r = dcfg.recognize(g, w)
            checked += 1
            accepted += m
            if not m == p == r:
                disagreements.append((arities, w, m, p, r))
        totals.append(f"{arities}: {checked} words, {accepted} in D(X)")
    ok = not disagreements
    report(capsys, 1, ok, "; ".join(totals) + f"; disagreements {len(disagreements)}")
    assert ok, disagreements[:5]


# -- 2 -----------------------------------------------------------------------------------------

def is_cube(s):
    n = len(s)
    return n > 0 and n % 3 == 0 and s[: n // 3] * 3 == s


def test_criterion_2_copy_power_grammar(capsys):
    g2 = dcfg.build_copy_power_grammar(2)
    d = dcfg.derive(g2, "abaabaaba")
    trace_ok = d is not None and "".join(d.value) == "abaabaaba" and list(d.steps) == [0, 3, 2, 4]
    mismatches = [s for s in map("".join, words("ab", 9)) if dcfg.recognize(g2, s) != is_cube(s)]
    ok = trace_ok and not mismatches
    report(capsys, 2, ok, f"derivation {'ok' if trace_ok else 'wrong'}, "
                          f"{2 ** 10 - 1} words, mismatches {len(mismatches)}")
    assert trace_ok
    assert not mismatches, mismatches[:5]


# -- 3 -----------------------------------------------------------------------------------------

def test_criterion_3_abc_valence(capsys):
    a = valence.build_abc_valence()
    pattern = re.compile(r"(a+)(b+)(c+)")

    def expected(s):
        m = pattern.fullmatch(s)
        return bool(m) and len(m[1]) == len(m[2]) == len(m[3])

    results = [(s, valence.run_valence(a, s).outcome) for s in map("".join, words("abc", 9))]
    unknown = [s for s, o in results if o is Outcome.UNKNOWN]
    mismatches = [s for s, o in results if (o is Outcome.ACCEPT) != expected(s)]
    ok = not unknown and not mismatches
    report(capsys, 3, ok, f"{len(results)} words, unknown {len(unknown)}, mismatches {len(mismatches)}")
    assert ok, (unknown[:5], mismatches[:5])


# -- 4 -----------------------------------------------------------------------------------------

def copy_language(s):
    return re.fullmatch(r"(a*)(b*)\1\2", s) is not None


def stage_snapshots(witness):
    """Stacks at the moment each state is left through its KEEP edge."""
    out = {}
    for (_, (state, _, stacks)), (t, _) in zip(witness, witness[1:]):
        if t.op == KEEP:
            out[state] = stacks
    return out


def test_criterion_4_copy_machine(capsys):
    m = two_stack.build_copy_machine()
    results = [(s, two_stack.run_stsa(m, s).outcome) for s in map("".join, words("ab", 10))]
    mismatches = [s for s, o in results if (o is Outcome.ACCEPT) != copy_language(s)]
    trace_problems = []
    for m1, n1 in [(2, 1), (3, 2), (1, 3)]:
        word = "a" * m1 + "b" * n1 + "a" * m1 + "b" * n1
        run = two_stack.run_stsa(m, word, witness=True)
        snaps = stage_snapshots(run.witness)
        A1, B1, B2, A2, A3, B3 = [("A", 1)], [("B", 1)], [("B", 2)], [("A", 2)], [("A", 3)], [("B", 3)]
        expected = {
            "q0": (A1 * m1, A1 * m1),
            "q1": (A1 * m1 + B1 * n1, A1 * m1 + B1 * n1),
            "q2": (A1 * m1, A1 * m1 + B1 * n1 + B2 * n1),
            "q3": ([], A1 * m1 + B1 * n1 + B2 * n1 + A2 * m1),
            "q4": (A3 * m1, A1 * m1 + B1 * n1 + B2 * n1),
            "q5": (A3 * m1 + B3 * n1, A1 * m1 + B1 * n1),
        }
        for state, (s1, s2) in expected.items():
            if snaps.get(state) != (tuple(s1), tuple(s2)):
                trace_problems.append((word, state, snaps.get(state)))
    ok = not mismatches and not trace_problems
    report(capsys, 4, ok, f"{len(results)} words, mismatches {len(mismatches)}, "
                          f"trace deviations {len(trace_problems)}")
    assert not mismatches, mismatches[:5]
    assert not trace_problems, trace_problems[:3]


# -- 5 -----------------------------------------------------------------------------------------

def test_criterion_5_psi_garlands(capsys):
    machines = {
        "copy": two_stack.stsa_to_gstsa(two_stack.desugar_keep(two_stack.build_copy_machine())),
        "G1": g1_gstsa(),
        "G2": g2_gstsa(),
    }
    violations = []
    counted = {}
    for name, m in machines.items():
        n_comp = 0

        def visit(config, m=m, name=name):
            bad = two_stack.counter_violations(*config[2], m.rank)
            if bad:
                violations.append((name, "counters", config, bad))

        for w in words(m.alphabet, 8):
            comps = two_stack.enumerate_accepting_computations(m, w, visit=visit)
            if comps.truncated:
                violations.append((name, "truncated", w))
            for c in comps:
                n_comp += 1
                check = two_stack.is_k_garland(two_stack.psi_image(c), m.rank)
                if not check:
                    violations.append((name, "garland", w, check.reason))
                bad = two_stack.balance_violations(c)
                if bad:
                    violations.append((name, "balance", w, bad))
        counted[name] = n_comp
    ok = not violations and all(counted.values())
    report(capsys, 5, ok, f"computations {counted}, violations {len(violations)}")
    assert all(counted.values()), counted
    assert not violations, violations[:5]


# -- 6 -----------------------------------------------------------------------------------------

def _runner(kind, machine):
    if kind == "pda":
        return lambda w: valence.run_lookup_pda(machine, w)
    if kind == "valence":
        return lambda w: valence.run_valence(machine, w)
    return lambda w: two_stack.run_stsa(machine, w)


def test_criterion_6_conversions(capsys):
    copy = two_stack.build_copy_machine()
    desugared = two_stack.desugar_keep(copy)
    anbn = valence.build_anbn_pda()
    deep = anbn_depth2_pda()
    sighted = sighted_gstsa()
    cases = [
        ("desugarKeep", "stsa", copy, "stsa", desugared, "ab", 10),
        ("stsaToGstsa", "stsa", copy, "gstsa", two_stack.stsa_to_gstsa(desugared), "ab", 10),
        ("eliminateLookupPDA", "pda", anbn, "pda", valence.eliminate_lookup_pda(anbn), "ab", 8),
        ("eliminateLookupPDA depth 2", "pda", deep, "pda", valence.eliminate_lookup_pda(deep), "abc", 8),
        ("eliminateLookupGstsa", "gstsa", sighted, "gstsa", two_stack.eliminate_lookup_gstsa(sighted), "ab", 8),
        ("pdaToValence", "pda", anbn, "valence",
         valence.pda_to_valence(valence.eliminate_lookup_pda(anbn)), "ab", 8),
    ]
    outcomes = {}
    for name, lk, left, rk, right, alphabet, n in cases:
        outcomes[name] = crossvalidate(_runner(lk, left), _runner(rk, right), alphabet, n)
    ok = all(r["result"] == "equal" for r in outcomes.values())
    report(capsys, 6, ok, ", ".join(f"{k}: {v['result']} ({v['checked']})" for k, v in outcomes.items()))
    assert ok, outcomes


# -- 7 -----------------------------------------------------------------------------------------

def random_element(rng, symbols="abc"):
    if rng.random() < 0.05:
        return monoids.ZERO
    gens = [(rng.choice(("push", "pop")), rng.choice(symbols)) for _ in range(rng.randint(0, 6))]
    return monoids.pc_reduce_word(gens)


def test_criterion_7_monoid_laws(capsys):
    rng = random.Random(20261019)
    assoc_fail = 0
    for _ in range(10_000):
        a, b, c = (random_element(rng) for _ in range(3))
        if (a * b) * c != a * (b * c):
            assoc_fail += 1
    hom_fail = 0
    alphabets = [RankedAlphabet(a) for a in DYCK_ALPHABETS]
    for _ in range(1_000):
        x = rng.choice(alphabets)
        letters = x.letters()
        w = [rng.choice(letters) for _ in range(rng.randint(0, 12))]
        cut = rng.randint(0, len(w))
        if monoids.sx_reduce(w, x) != monoids.sx_reduce(w[:cut], x) * monoids.sx_reduce(w[cut:], x):
            hom_fail += 1
    ok = assoc_fail == 0 and hom_fail == 0
    report(capsys, 7, ok, f"associativity failures {assoc_fail}/10000, homomorphism failures {hom_fail}/1000")
    assert ok


# -- 8 -----------------------------------------------------------------------------------------

def test_criterion_8_garland_truth_table(capsys):
    g = two_stack.parse_garland
    long = g("a,a a',b b,b' b',a'")
    table = [
        (g(""), 1, True), (g(""), 3, True),
        (g("a,a a',a'"), 1, True),
        (long, 2, True), (long, 1, False),
    ]
    wrong = [(two_stack.format_garland(w), k) for w, k, want in table
             if bool(two_stack.is_k_garland(w, k)) != want]
    check = two_stack.is_k_garland(long, 2)
    r1 = {(i, j) for i, j in check.r1.items() if i < j}
    r2 = {(i, j) for i, j in check.r2.items() if i < j}
    relations_ok = r1 == {(0, 1), (2, 3)} and r2 == {(1, 2), (0, 3)}
    cycles_ok = (two_stack.extract_garland_cycles(long) == [(0, 1, 2, 3)]
                 and len(two_stack.extract_garland_cycles(g("a,a a',a' a,a a',a'"))) == 2)
    try:
        two_stack.extract_garland_cycles(g("a,a b',b'"))
        rejects = False
    except two_stack.NotAGarland:
        rejects = True
    ok = not wrong and relations_ok and cycles_ok and rejects
    report(capsys, 8, ok, f"table mismatches {len(wrong)}, relations {'ok' if relations_ok else 'wrong'}, "
                          f"cycles {'ok' if cycles_ok else 'wrong'}, non-garland {'rejected' if rejects else 'accepted'}")
    assert ok, wrong
