"""Desk-scale verifier-prover payment protocols compiled to game trees.

Each builder returns the tree, the honest profile its analysis singles out, the
payment rescaling factor applied to fit the per-terminal budget, and the answer
bit a correct run must produce. Verifier coin flips become Nature moves; a
prover's information sets pool exactly the histories it cannot tell apart
(private channels, unseen co-prover messages).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from .errors import CapExceededError, GameError
from .trees import (
    NATURE,
    DecisionNode,
    GameTree,
    History,
    InformationSet,
    Node,
    StrategyProfile,
    TerminalNode,
    group_info_sets,
)

VERTEX_CAP = 4
QUERY_CAP = 3
P2_STRATEGY_CAP = 1 << 20


@dataclass(frozen=True)
class ProtocolGame:
    game: GameTree
    honest: StrategyProfile
    scale: Fraction  # stored payments = scale * protocol dollars
    correct_bit: int


# ---------------------------------------------------------------------------
# Toy one-round two-prover MIP blackboxes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MipOutcome:
    label: str
    prob: Fraction
    p1_query: str
    p2_query: str


@dataclass(frozen=True)
class MipBlackbox:
    """One-round, two-prover proof system with a deterministic accept predicate."""

    name: str
    outcomes: tuple[MipOutcome, ...]
    p1_answers: tuple[tuple[str, tuple[str, ...]], ...]  # query -> alphabet
    p2_answers: tuple[tuple[str, tuple[str, ...]], ...]
    accepts: Callable[[str, str, str], bool] = field(compare=False)
    is_true: bool = True
    soundness: Fraction | None = None  # exact max accept probability when false
    honest_p1: tuple[tuple[str, str], ...] = ()
    honest_p2: tuple[tuple[str, str], ...] = ()
    params: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def p1_alphabet(self, query: str) -> tuple[str, ...]:
        return dict(self.p1_answers)[query]

    def p2_alphabet(self, query: str) -> tuple[str, ...]:
        return dict(self.p2_answers)[query]


def fixed_soundness_mip(accepting: int, total: int) -> MipBlackbox:
    """Blackbox accepting canonical answers on exactly `accepting` of `total`
    equally likely verifier draws; soundness is exactly accepting/total."""
    if not (0 <= accepting <= total) or total < 1:
        raise GameError(f"need 0 <= accepting <= total, got {accepting}/{total}")
    width = len(str(total))
    outcomes = tuple(
        MipOutcome(f"q{i:0{width}d}", Fraction(1, total), "go", "go")
        for i in range(1, total + 1)
    )
    accept_set = {f"q{i:0{width}d}" for i in range(1, accepting + 1)}

    def accepts(label: str, a1: str, a2: str) -> bool:
        return a1 == "1" and a2 == "1" and label in accept_set

    is_true = accepting == total
    return MipBlackbox(
        name=f"fixed-{accepting}-of-{total}",
        outcomes=outcomes,
        p1_answers=(("go", ("0", "1")),),
        p2_answers=(("go", ("0", "1")),),
        accepts=accepts,
        is_true=is_true,
        soundness=None if is_true else Fraction(accepting, total),
        honest_p1=(("go", "1"),),
        honest_p2=(("go", "1"),),
        params={"kind": "fixed", "accepting": accepting, "total": total},
    )


Clause = tuple[int, ...]  # nonzero ints; sign is polarity, abs is 1-based var


def _clause_satisfied(clause: Clause, assignment: Mapping[int, int]) -> bool:
    return any(
        (assignment[abs(lit)] == 1) == (lit > 0) for lit in clause
    )


def _satisfying_assignments(clauses: Sequence[Clause], num_vars: int):
    for bits in itertools.product((0, 1), repeat=num_vars):
        assignment = {v + 1: bits[v] for v in range(num_vars)}
        if all(_clause_satisfied(c, assignment) for c in clauses):
            yield assignment


def parse_dimacs(text: str) -> tuple[int, tuple[Clause, ...]]:
    num_vars = 0
    clauses: list[Clause] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise GameError(f"line {lineno}: malformed problem line {line!r}")
            num_vars = int(parts[2])
            continue
        lits = [int(tok) for tok in line.split()]
        if lits and lits[-1] == 0:
            lits = lits[:-1]
        if not lits:
            raise GameError(f"line {lineno}: empty clause")
        clauses.append(tuple(lits))
    return num_vars, tuple(clauses)


def toy_clause_variable_mip(
    clauses: Sequence[Clause], num_vars: int, repetitions: int = 1
) -> MipBlackbox:
    """Clause-versus-variable consistency test, repeated independently.

    The verifier draws a clause and a variable inside it per repetition; the
    first prover commits the clause's full assignment, the second the probed
    variable's bit; accept needs every repetition satisfied and consistent.
    The reported soundness for an unsatisfiable formula is the exact maximum
    accept probability over all prover strategy pairs.
    """
    if num_vars < 1 or num_vars > 4 or len(clauses) > 6 or not clauses:
        raise GameError("formula out of desk scale (at most 4 variables, 6 clauses)")
    if not (1 <= repetitions <= 3):
        raise GameError("repetitions must be between 1 and 3")
    for c in clauses:
        if not c or any(lit == 0 or abs(lit) > num_vars for lit in c):
            raise GameError(f"bad clause {c}")

    single = []
    m = len(clauses)
    for ci, clause in enumerate(clauses):
        vars_in = sorted({abs(lit) for lit in clause})
        for v in vars_in:
            single.append((ci, v, Fraction(1, m * len(vars_in))))
    draws = list(itertools.product(single, repeat=repetitions))

    def p1_query_of(draw) -> str:
        return "+".join(f"c{ci + 1}" for (ci, _, _) in draw)

    def p2_query_of(draw) -> str:
        return "+".join(f"v{v}" for (_, v, _) in draw)

    outcomes = []
    for draw in draws:
        prob = Fraction(1)
        for (_, _, p) in draw:
            prob *= p
        label = "+".join(f"c{ci + 1}.v{v}" for (ci, v, _) in draw)
        outcomes.append(MipOutcome(label, prob, p1_query_of(draw), p2_query_of(draw)))

    clause_vars = [sorted({abs(lit) for lit in c}) for c in clauses]

    def assignment_labels(ci: int) -> tuple[str, ...]:
        k = len(clause_vars[ci])
        return tuple("".join(str(b) for b in bits) for bits in itertools.product((0, 1), repeat=k))

    p1_alpha: dict[str, tuple[str, ...]] = {}
    for draw in draws:
        q = p1_query_of(draw)
        if q not in p1_alpha:
            p1_alpha[q] = tuple(
                "+".join(parts)
                for parts in itertools.product(
                    *(assignment_labels(ci) for (ci, _, _) in draw)
                )
            )
    p2_alpha: dict[str, tuple[str, ...]] = {}
    for draw in draws:
        q = p2_query_of(draw)
        if q not in p2_alpha:
            p2_alpha[q] = tuple(
                "+".join(parts)
                for parts in itertools.product(("0", "1"), repeat=repetitions)
            )

    def accepts(label: str, a1: str, a2: str) -> bool:
        probes = label.split("+")
        answers1 = a1.split("+")
        answers2 = a2.split("+")
        for probe, part1, part2 in zip(probes, answers1, answers2):
            c_part, v_part = probe.split(".")
            ci = int(c_part[1:]) - 1
            v = int(v_part[1:])
            assignment = dict(zip(clause_vars[ci], (int(b) for b in part1)))
            if not _clause_satisfied(clauses[ci], assignment):
                return False
            if assignment[v] != int(part2):
                return False
        return True

    sat = next(iter(_satisfying_assignments(clauses, num_vars)), None)
    params = {
        "kind": "clause_var",
        "clauses": [list(c) for c in clauses],
        "num_vars": num_vars,
        "repetitions": repetitions,
    }
    if sat is not None:
        honest_p1 = {}
        for q, alphabet in p1_alpha.items():
            parts = []
            for c_part in q.split("+"):
                ci = int(c_part[1:]) - 1
                parts.append("".join(str(sat[v]) for v in clause_vars[ci]))
            honest_p1[q] = "+".join(parts)
        honest_p2 = {
            q: "+".join(str(sat[int(v_part[1:])]) for v_part in q.split("+"))
            for q in p2_alpha
        }
        return MipBlackbox(
            name=f"clause-var-sat-{len(clauses)}x{num_vars}r{repetitions}",
            outcomes=tuple(outcomes),
            p1_answers=tuple(sorted(p1_alpha.items())),
            p2_answers=tuple(sorted(p2_alpha.items())),
            accepts=accepts,
            is_true=True,
            soundness=None,
            honest_p1=tuple(sorted(honest_p1.items())),
            honest_p2=tuple(sorted(honest_p2.items())),
            params=params,
        )

    # Unsatisfiable: exact soundness by scanning P2 strategies with a
    # per-query best response for P1.
    p2_queries = sorted(p2_alpha)
    space = 1
    for q in p2_queries:
        space *= len(p2_alpha[q])
    if space > P2_STRATEGY_CAP:
        raise CapExceededError(
            f"{space} second-prover strategies exceed cap {P2_STRATEGY_CAP}", space
        )
    by_p1_query: dict[str, list[MipOutcome]] = {}
    for o in outcomes:
        by_p1_query.setdefault(o.p1_query, []).append(o)
    best_value: Fraction | None = None
    best_pair: tuple[dict[str, str], dict[str, str]] | None = None
    for combo in itertools.product(*(p2_alpha[q] for q in p2_queries)):
        sigma2 = dict(zip(p2_queries, combo))
        total = Fraction(0)
        sigma1 = {}
        for q, group in sorted(by_p1_query.items()):
            best_a, best_p = None, None
            for a1 in p1_alpha[q]:
                p = sum(
                    (o.prob for o in group if accepts(o.label, a1, sigma2[o.p2_query])),
                    Fraction(0),
                )
                if best_p is None or p > best_p:
                    best_a, best_p = a1, p
            sigma1[q] = best_a
            total += best_p
        if best_value is None or total > best_value:
            best_value, best_pair = total, (sigma1, sigma2)
    return MipBlackbox(
        name=f"clause-var-unsat-{len(clauses)}x{num_vars}r{repetitions}",
        outcomes=tuple(outcomes),
        p1_answers=tuple(sorted(p1_alpha.items())),
        p2_answers=tuple(sorted(p2_alpha.items())),
        accepts=accepts,
        is_true=False,
        soundness=best_value,
        honest_p1=tuple(sorted(best_pair[0].items())),
        honest_p2=tuple(sorted(best_pair[1].items())),
        params=params,
    )


def mip_from_params(params: Mapping[str, Any]) -> MipBlackbox:
    kind = params.get("kind")
    if kind == "fixed":
        return fixed_soundness_mip(int(params["accepting"]), int(params["total"]))
    if kind == "clause_var":
        return toy_clause_variable_mip(
            tuple(tuple(c) for c in params["clauses"]),
            int(params["num_vars"]),
            int(params["repetitions"]),
        )
    raise GameError(f"unknown blackbox kind {kind!r}")


# ---------------------------------------------------------------------------
# Graph 3-coloring protocol
# ---------------------------------------------------------------------------


def build_three_coloring(
    num_vertices: int, edges: Sequence[tuple[int, int]], vertex_cap: int = VERTEX_CAP
) -> ProtocolGame:
    """Claim-then-audit protocol: the first prover claims 3-colorability and, on
    a yes, commits a coloring; the second prover agrees or names a bad edge.

    Dollar payments (1,1 no), (2,1 agreed yes), (0,2 caught), (2,0 bad audit)
    are rescaled by 1/4.
    """
    if num_vertices < 1 or num_vertices > vertex_cap:
        raise GameError(f"vertex count {num_vertices} exceeds cap {vertex_cap}")
    edge_list = []
    for u, v in edges:
        if not (0 <= u < num_vertices and 0 <= v < num_vertices) or u == v:
            raise GameError(f"bad edge ({u}, {v})")
        edge_list.append((min(u, v), max(u, v)))
    edge_list = sorted(set(edge_list))
    if not edge_list:
        raise GameError("graph must have at least one edge")

    scale = Fraction(1, 4)

    def pay(p1_dollars: int, p2_dollars: int) -> tuple[Fraction, Fraction]:
        return (scale * p1_dollars, scale * p2_dollars)

    colorings = ["".join(c) for c in itertools.product("012", repeat=num_vertices)]

    def monochromatic(coloring: str) -> list[tuple[int, int]]:
        return [e for e in edge_list if coloring[e[0]] == coloring[e[1]]]

    edge_labels = [f"edge:{u}-{v}" for u, v in edge_list]
    p2_actions = ("agree",) + tuple(edge_labels)

    nodes: dict[History, Node] = {
        (): DecisionNode(1, ("no", "yes")),
        ("no",): TerminalNode(pay(1, 1), 0),
        ("yes",): DecisionNode(1, tuple(f"col:{c}" for c in colorings)),
    }
    for c in colorings:
        h = ("yes", f"col:{c}")
        nodes[h] = DecisionNode(2, p2_actions)
        nodes[h + ("agree",)] = TerminalNode(pay(2, 1), 1)
        mono = set(monochromatic(c))
        for (u, v), label in zip(edge_list, edge_labels):
            good_catch = (u, v) in mono
            nodes[h + (label,)] = TerminalNode(
                pay(0, 2) if good_catch else pay(2, 0), 1
            )

    valid = [c for c in colorings if not monochromatic(c)]
    colorable = bool(valid)
    meta = {
        "protocol": "three_coloring",
        "vertices": num_vertices,
        "edges": [list(e) for e in edge_list],
        "scale": str(scale),
        "correct_bit": 1 if colorable else 0,
    }
    game = GameTree(
        2,
        nodes,
        tuple(
            InformationSet(n.player, (h,), n.actions)
            for h, n in sorted(nodes.items())
            if isinstance(n, DecisionNode)
        ),
        meta,
    )

    choices = {
        game.set_by_history[()].key: "yes" if colorable else "no",
        game.set_by_history[("yes",)].key: f"col:{valid[0] if colorable else colorings[0]}",
    }
    for c in colorings:
        h = ("yes", f"col:{c}")
        mono = monochromatic(c)
        choices[game.set_by_history[h].key] = (
            "agree" if not mono else f"edge:{mono[0][0]}-{mono[0][1]}"
        )
    honest = StrategyProfile.from_dict(choices)
    return ProtocolGame(game, honest, scale, 1 if colorable else 0)


# ---------------------------------------------------------------------------
# Membership protocol on top of a MIP blackbox
# ---------------------------------------------------------------------------


def build_nexp_protocol(mip: MipBlackbox) -> ProtocolGame:
    """Answer bit first; a yes claim triggers the blackbox with both provers.

    Dollar payments: (1/2,1/2) on a no; (1,1) accept / (-1,-1) reject after a
    yes. Rescaled by 1/2 to meet the total budget.
    """
    scale = Fraction(1, 2)
    half, one = scale * Fraction(1, 2), scale * 1
    nodes: dict[History, Node] = {
        (): DecisionNode(1, ("c=0", "c=1")),
        ("c=0",): TerminalNode((half, half), 0),
        ("c=1",): DecisionNode(
            NATURE,
            tuple(o.label for o in mip.outcomes),
            tuple(o.prob for o in mip.outcomes),
        ),
    }
    signals: dict[History, Any] = {(): ("root",)}
    for o in mip.outcomes:
        h1 = ("c=1", o.label)
        nodes[h1] = DecisionNode(1, mip.p1_alphabet(o.p1_query))
        signals[h1] = ("p1", o.p1_query)
        for a1 in mip.p1_alphabet(o.p1_query):
            h2 = h1 + (a1,)
            nodes[h2] = DecisionNode(2, mip.p2_alphabet(o.p2_query))
            signals[h2] = ("p2", o.p2_query)
            for a2 in mip.p2_alphabet(o.p2_query):
                ok = mip.accepts(o.label, a1, a2)
                nodes[h2 + (a2,)] = TerminalNode(
                    (one, one) if ok else (-one, -one), 1
                )
    info_sets = group_info_sets(nodes, signals)
    meta = {
        "protocol": "nexp",
        "mip": dict(mip.params),
        "scale": str(scale),
        "correct_bit": 1 if mip.is_true else 0,
    }
    game = GameTree(2, nodes, info_sets, meta)

    choices = {game.set_by_history[()].key: "c=1" if mip.is_true else "c=0"}
    honest1, honest2 = dict(mip.honest_p1), dict(mip.honest_p2)
    for iset in info_sets:
        sig = signals[iset.members[0]]
        if sig[0] == "p1":
            choices[iset.key] = honest1[sig[1]]
        elif sig[0] == "p2":
            choices[iset.key] = honest2[sig[1]]
    honest = StrategyProfile.from_dict(choices)
    return ProtocolGame(game, honest, scale, 1 if mip.is_true else 0)


# ---------------------------------------------------------------------------
# Adaptive oracle-query protocol
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleScript:
    """Deterministic decision procedure issuing adaptive yes/no oracle queries.

    `next_query[(q, b)]` names the follow-up after answer `b` to query `q`;
    `output[bits]` is the machine's decision for each full answer vector.
    """

    first: str
    next_query: Mapping[tuple[str, int], str]
    output: Mapping[tuple[int, ...], int]
    num_queries: int

    def query_path(self, bits: Sequence[int]) -> list[str]:
        path = [self.first]
        for i in range(1, self.num_queries):
            path.append(self.next_query[(path[-1], bits[i - 1])])
        return path


def build_pnexp_protocol(
    script: OracleScript, mips: Mapping[str, MipBlackbox]
) -> ProtocolGame:
    """First prover commits the machine's answer and every oracle answer; a
    random query is re-proved by the other two provers via the membership
    protocol. Dollar payments rescaled by 1/3.
    """
    alpha = script.num_queries
    if not (1 <= alpha <= QUERY_CAP):
        raise GameError(f"query count {alpha} exceeds cap {QUERY_CAP}")
    scale = Fraction(1, 3)

    def p(x: Fraction | int) -> Fraction:
        return scale * Fraction(x)

    nodes: dict[History, Node] = {}
    signals: dict[History, Any] = {}
    root_actions = []
    for c in (0, 1):
        for bits in itertools.product((0, 1), repeat=alpha):
            root_actions.append(f"ans:{c};{''.join(str(b) for b in bits)}")
    nodes[()] = DecisionNode(1, tuple(root_actions))
    signals[()] = ("root",)

    for action in root_actions:
        c = int(action[4])
        bits = tuple(int(b) for b in action.split(";")[1])
        queries = script.query_path(bits)
        out = script.output[bits]
        r: History = (action,)
        if out != c:
            nodes[r] = TerminalNode((p(-1), p(0), p(0)), c)
            continue
        idx_labels = tuple(f"i={k}" for k in range(1, alpha + 1))
        nodes[r] = DecisionNode(
            NATURE, idx_labels, tuple(Fraction(1, alpha) for _ in idx_labels)
        )
        for k in range(1, alpha + 1):
            q = queries[k - 1]
            mip = mips[q]
            claimed = bits[k - 1]
            hq = r + (f"i={k}",)
            nodes[hq] = DecisionNode(2, ("c*=0", "c*=1"))
            signals[hq] = ("bit", k, q)
            r1_if = {0: p(1 if claimed == 0 else 0), 1: p(1 if claimed == 1 else 0)}
            nodes[hq + ("c*=0",)] = TerminalNode(
                (r1_if[0], p(Fraction(1, 2)), p(Fraction(1, 2))), c
            )
            hm = hq + ("c*=1",)
            nodes[hm] = DecisionNode(
                NATURE,
                tuple(o.label for o in mip.outcomes),
                tuple(o.prob for o in mip.outcomes),
            )
            for o in mip.outcomes:
                h1 = hm + (o.label,)
                nodes[h1] = DecisionNode(2, mip.p1_alphabet(o.p1_query))
                signals[h1] = ("mip1", k, q, o.p1_query)
                for a1 in mip.p1_alphabet(o.p1_query):
                    h2 = h1 + (a1,)
                    nodes[h2] = DecisionNode(3, mip.p2_alphabet(o.p2_query))
                    signals[h2] = ("mip2", k, q, o.p2_query)
                    for a2 in mip.p2_alphabet(o.p2_query):
                        ok = mip.accepts(o.label, a1, a2)
                        nodes[h2 + (a2,)] = TerminalNode(
                            (r1_if[1], p(1), p(1)) if ok else (r1_if[1], p(-1), p(-1)),
                            c,
                        )
    info_sets = group_info_sets(nodes, signals)
    honest_bits = []
    q = script.first
    for k in range(1, alpha + 1):
        b = 1 if mips[q].is_true else 0
        honest_bits.append(b)
        if k < alpha:
            q = script.next_query[(q, b)]
    correct = script.output[tuple(honest_bits)]
    meta = {
        "protocol": "pnexp",
        "first": script.first,
        "next": {f"{q},{b}": q2 for (q, b), q2 in sorted(script.next_query.items())},
        "output": {
            "".join(str(b) for b in bits): out
            for bits, out in sorted(script.output.items())
        },
        "num_queries": alpha,
        "mips": {q: dict(m.params) for q, m in sorted(mips.items())},
        "scale": str(scale),
        "correct_bit": correct,
    }
    game = GameTree(3, nodes, info_sets, meta)

    choices = {
        game.set_by_history[()].key: f"ans:{correct};{''.join(str(b) for b in honest_bits)}"
    }
    for iset in info_sets:
        sig = signals[iset.members[0]]
        if sig[0] == "bit":
            choices[iset.key] = "c*=1" if mips[sig[2]].is_true else "c*=0"
        elif sig[0] == "mip1":
            choices[iset.key] = dict(mips[sig[2]].honest_p1)[sig[3]]
        elif sig[0] == "mip2":
            choices[iset.key] = dict(mips[sig[2]].honest_p2)[sig[3]]
    honest = StrategyProfile.from_dict(choices)
    return ProtocolGame(game, honest, scale, correct)


# ---------------------------------------------------------------------------
# Cooperative-protocol simulation
# ---------------------------------------------------------------------------

Transcript = tuple[tuple[str, ...], ...]  # per prover, per round


@dataclass(frozen=True)
class MripSpec:
    """Tiny cooperative protocol: deterministic interaction, payment in [0,1]
    per full transcript, strictly positive optimum."""

    provers: int
    rounds: int
    alphabet: tuple[str, ...]
    payments: Mapping[Transcript, Fraction]

    def validate(self) -> None:
        if not (1 <= self.provers <= 2) or not (1 <= self.rounds <= 2):
            raise GameError("spec out of desk scale (at most 2 provers, 2 rounds)")
        if not (1 <= len(self.alphabet) <= 4):
            raise GameError("alphabet must have 1..4 symbols")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise GameError("alphabet symbols must be distinct")
        for sym in self.alphabet:
            if not sym or any(ch in sym for ch in "+;./|"):
                raise GameError(f"symbol {sym!r} is empty or uses a reserved character")
        space = [
            tuple(itertools.product(self.alphabet, repeat=self.rounds))
            for _ in range(self.provers)
        ]
        best = None
        for transcript in itertools.product(*space):
            r = self.payments.get(transcript)
            if r is None:
                raise GameError(f"payment missing for transcript {transcript}")
            if not (0 <= r <= 1):
                raise GameError(f"payment {r} outside [0,1]")
            if best is None or r > best:
                best = r
        if best is None or best <= 0:
            raise GameError("optimum payment must be strictly positive")


def _transcripts(spec: MripSpec):
    space = [
        tuple(itertools.product(spec.alphabet, repeat=spec.rounds))
        for _ in range(spec.provers)
    ]
    return itertools.product(*space)


def build_mrip_simulation(spec: MripSpec) -> ProtocolGame:
    """Cross-examination simulation: the first prover commits the transcript,
    the second is probed on one random prover/round with a random guessed
    prefix; answers are cross-checked. Payments rescaled by 1/2.
    """
    spec.validate()
    scale = Fraction(1, 2)
    best_transcript = None
    best_pay = None
    for t in _transcripts(spec):
        r = spec.payments[t]
        if best_pay is None or r > best_pay:
            best_transcript, best_pay = t, r

    def conditional_best(i: int, prefix: tuple[str, ...]) -> Transcript:
        cands = [t for t in _transcripts(spec) if t[i][: len(prefix)] == prefix]
        best, best_r = None, None
        for t in cands:
            r = spec.payments[t]
            if best_r is None or r > best_r:
                best, best_r = t, r
        return best

    round1 = tuple(itertools.product(spec.alphabet, repeat=spec.provers))
    step1_actions = tuple("send:" + "+".join(combo) for combo in round1)

    probes = []  # (i 0-based, j 1-based, prefix)
    for i in range(spec.provers):
        for j in range(1, spec.rounds + 1):
            for prefix in itertools.product(spec.alphabet, repeat=j - 1):
                prob = Fraction(1, spec.provers * spec.rounds * len(spec.alphabet) ** (j - 1))
                label = f"probe:{i + 1}.{j}" + ("." + "+".join(prefix) if prefix else "")
                probes.append((i, j, prefix, prob, label))

    rest_space = tuple(
        itertools.product(spec.alphabet, repeat=spec.provers * (spec.rounds - 1))
    )

    def transcript_of(step1: tuple[str, ...], rest: tuple[str, ...]) -> Transcript:
        per = []
        for i in range(spec.provers):
            tail = rest[i * (spec.rounds - 1): (i + 1) * (spec.rounds - 1)]
            per.append((step1[i],) + tail)
        return tuple(per)

    def outcome(
        transcript: Transcript, i: int, j: int, prefix: tuple[str, ...], answer: str
    ) -> TerminalNode:
        bit = 1 if transcript[0][0][0] == "1" else 0
        if transcript[i][: j - 1] != prefix:
            return TerminalNode((Fraction(0), Fraction(0)), bit)
        if transcript[i][j - 1] != answer:
            return TerminalNode((-scale, -scale), bit)
        return TerminalNode((Fraction(0), scale * spec.payments[transcript]), bit)

    nodes: dict[History, Node] = {(): DecisionNode(1, step1_actions)}
    signals: dict[History, Any] = {(): ("root",)}
    probe_labels = tuple(pr[4] for pr in probes)
    probe_dist = tuple(pr[3] for pr in probes)
    for combo, action in zip(round1, step1_actions):
        h = (action,)
        nodes[h] = DecisionNode(NATURE, probe_labels, probe_dist)
        for (i, j, prefix, _, label) in probes:
            hp = h + (label,)
            nodes[hp] = DecisionNode(2, spec.alphabet)
            signals[hp] = ("probe", label)
            for answer in spec.alphabet:
                ha = hp + (answer,)
                if spec.rounds == 1:
                    transcript = transcript_of(combo, ())
                    nodes[ha] = outcome(transcript, i, j, prefix, answer)
                else:
                    rest_actions = tuple("rest:" + "+".join(r) for r in rest_space)
                    nodes[ha] = DecisionNode(1, rest_actions)
                    signals[ha] = ("rest", action)
                    for rest, rest_action in zip(rest_space, rest_actions):
                        transcript = transcript_of(combo, rest)
                        nodes[ha + (rest_action,)] = outcome(
                            transcript, i, j, prefix, answer
                        )
    info_sets = group_info_sets(nodes, signals)
    meta = {
        "protocol": "mrip",
        "provers": spec.provers,
        "rounds": spec.rounds,
        "alphabet": list(spec.alphabet),
        "payments": {
            ";".join("+".join(per) for per in t): str(r)
            for t, r in sorted(spec.payments.items())
        },
        "scale": str(scale),
        "correct_bit": 1 if best_transcript[0][0][0] == "1" else 0,
    }
    game = GameTree(2, nodes, info_sets, meta)

    choices = {
        game.set_by_history[()].key: "send:"
        + "+".join(best_transcript[i][0] for i in range(spec.provers))
    }
    for iset in info_sets:
        sig = signals[iset.members[0]]
        if sig[0] == "probe":
            parts = sig[1].split(".")
            i = int(parts[0].split(":")[1]) - 1
            j = int(parts[1])
            prefix = tuple(parts[2].split("+")) if len(parts) > 2 else ()
            committed = (
                best_transcript if j == 1 else conditional_best(i, prefix)
            )
            choices[iset.key] = committed[i][j - 1]
        elif sig[0] == "rest":
            # Continuations must use the same tie-break as the probe answers,
            # or the cross-check would punish the honest pair on ties.
            step1 = tuple(sig[1].split(":")[1].split("+"))
            parts = []
            for i in range(spec.provers):
                parts.extend(conditional_best(i, (step1[i],))[i][1:])
            choices[iset.key] = "rest:" + "+".join(parts)
    honest = StrategyProfile.from_dict(choices)
    correct = 1 if best_transcript[0][0][0] == "1" else 0
    return ProtocolGame(game, honest, scale, correct)


def honest_strategy(game_or_build: ProtocolGame | GameTree) -> StrategyProfile:
    """The profile argued dominant for a builder-produced game."""
    if isinstance(game_or_build, ProtocolGame):
        return game_or_build.honest
    meta = dict(game_or_build.meta)
    kind = meta.get("protocol")
    if kind == "three_coloring":
        build = build_three_coloring(
            int(meta["vertices"]), [tuple(e) for e in meta["edges"]]
        )
    elif kind == "nexp":
        build = build_nexp_protocol(mip_from_params(meta["mip"]))
    elif kind == "pnexp":
        next_query = {}
        for key, q2 in meta["next"].items():
            q, b = key.rsplit(",", 1)
            next_query[(q, int(b))] = q2
        script = OracleScript(
            meta["first"],
            next_query,
            {tuple(int(b) for b in bits): int(out) for bits, out in meta["output"].items()},
            int(meta["num_queries"]),
        )
        build = build_pnexp_protocol(
            script, {q: mip_from_params(p) for q, p in meta["mips"].items()}
        )
    elif kind == "mrip":
        payments = {}
        for key, r in meta["payments"].items():
            transcript = tuple(tuple(per.split("+")) for per in key.split(";"))
            payments[transcript] = Fraction(r)
        build = build_mrip_simulation(
            MripSpec(
                int(meta["provers"]),
                int(meta["rounds"]),
                tuple(meta["alphabet"]),
                payments,
            )
        )
    else:
        raise GameError("game does not carry builder metadata")
    return build.honest
