"""Extensive-form game trees with imperfect information, exact rationals throughout.

Histories are tuples of action labels; the empty tuple is the root. Payments,
chance probabilities and every derived utility are `fractions.Fraction`, so
best-response and dominance comparisons are never subject to floating-point
ties. Trees, information sets and strategy profiles are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Mapping, Union

from .errors import BeliefError, ProfileError, UnknownHistoryError

NATURE = 0  # player id of the chance player; provers are 1..p

History = tuple[str, ...]
Rational = Fraction

# Characters with structural meaning in history paths and set keys.
RESERVED_LABEL_CHARS = ("/", "|")


def rational(value: int | str | Fraction) -> Fraction:
    """Parse an exact rational; floats are rejected to keep arithmetic exact."""
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"exact rational required, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def path_of(history: History) -> str:
    """Canonical string form of a history ('' for the root)."""
    return "/".join(history)


def history_from_path(path: str) -> History:
    return tuple(path.split("/")) if path else ()


@dataclass(frozen=True)
class DecisionNode:
    player: int
    actions: tuple[str, ...]
    dist: tuple[Fraction, ...] | None = None  # present iff player is Nature


@dataclass(frozen=True)
class TerminalNode:
    payments: tuple[Fraction, ...]  # indexed by prover-1
    answer_bit: int


Node = Union[DecisionNode, TerminalNode]


@dataclass(frozen=True)
class InformationSet:
    """A prover's indistinguishability class; the unit of strategy assignment."""

    owner: int
    members: tuple[History, ...]  # sorted, nonempty
    actions: tuple[str, ...]

    @cached_property
    def key(self) -> str:
        return "|".join(sorted(path_of(h) for h in self.members))

    def __hash__(self) -> int:
        return hash((self.owner, self.members, self.actions))


@dataclass(frozen=True)
class StrategyProfile:
    """Pure strategy profile: one action per information set, keyed by set key."""

    choices: tuple[tuple[str, str], ...]  # sorted (set key, action label)

    @classmethod
    def from_dict(cls, mapping: Mapping[str, str]) -> "StrategyProfile":
        return cls(tuple(sorted(mapping.items())))

    def as_dict(self) -> dict[str, str]:
        return dict(self.choices)

    @cached_property
    def _map(self) -> dict[str, str]:
        return dict(self.choices)

    def action(self, set_key: str) -> str:
        try:
            return self._map[set_key]
        except KeyError:
            raise ProfileError(f"profile has no action for information set {set_key!r}")

    def replace(self, set_key: str, action: str) -> "StrategyProfile":
        """One-shot change: same profile except `action` at the named set."""
        items = dict(self.choices)
        items[set_key] = action
        return StrategyProfile(tuple(sorted(items.items())))

    def __hash__(self) -> int:
        return hash(self.choices)


@dataclass(frozen=True)
class GameTree:
    provers: int
    nodes: Mapping[History, Node]
    info_sets: tuple[InformationSet, ...]
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def node(self, h: History) -> Node:
        try:
            return self.nodes[h]
        except KeyError:
            raise UnknownHistoryError(f"history {path_of(h)!r} not in game")

    def is_terminal(self, h: History) -> bool:
        return isinstance(self.node(h), TerminalNode)

    @cached_property
    def terminals(self) -> tuple[History, ...]:
        return tuple(
            sorted(h for h, n in self.nodes.items() if isinstance(n, TerminalNode))
        )

    @cached_property
    def decision_histories(self) -> tuple[History, ...]:
        return tuple(
            sorted(h for h, n in self.nodes.items() if isinstance(n, DecisionNode))
        )

    @cached_property
    def set_by_history(self) -> dict[History, InformationSet]:
        out: dict[History, InformationSet] = {}
        for iset in self.info_sets:
            for h in iset.members:
                out[h] = iset
        return out

    @cached_property
    def set_by_key(self) -> dict[str, InformationSet]:
        return {iset.key: iset for iset in self.info_sets}

    @cached_property
    def sorted_sets(self) -> tuple[InformationSet, ...]:
        return tuple(sorted(self.info_sets, key=lambda s: s.key))

    @cached_property
    def height(self) -> int:
        return max((len(h) for h in self.nodes), default=0)

    @cached_property
    def topo_order(self) -> tuple[History, ...]:
        return tuple(sorted(self.nodes, key=len))

    def children(self, h: History) -> tuple[History, ...]:
        node = self.node(h)
        if isinstance(node, TerminalNode):
            return ()
        return tuple(h + (a,) for a in node.actions)


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _check_label(label: str, where: str, out: list[Violation]) -> None:
    if not label or any(c in label for c in RESERVED_LABEL_CHARS):
        out.append(
            Violation(
                "bad-label",
                where,
                f"action label {label!r} is empty or contains a reserved character",
            )
        )


def validate_game(game: GameTree) -> ValidationReport:
    """Check every structural invariant; violations are data, not failures."""
    out: list[Violation] = []
    if game.provers < 1:
        out.append(Violation("bad-provers", "", f"prover count {game.provers} < 1"))
    if () not in game.nodes:
        out.append(Violation("no-root", "", "root history missing"))
        return ValidationReport(tuple(out))

    for h in sorted(game.nodes):
        node = game.nodes[h]
        where = path_of(h)
        if h:
            parent = game.nodes.get(h[:-1])
            if parent is None:
                out.append(Violation("orphan", where, "parent history missing"))
                continue
            if not isinstance(parent, DecisionNode) or h[-1] not in parent.actions:
                out.append(
                    Violation("bad-parent", where, "not reachable by a parent action")
                )
        if isinstance(node, DecisionNode):
            if not node.actions:
                out.append(Violation("no-actions", where, "decision node with no actions"))
            for a in node.actions:
                _check_label(a, where, out)
                if h + (a,) not in game.nodes:
                    out.append(
                        Violation("missing-child", where, f"child for action {a!r} missing")
                    )
            if len(set(node.actions)) != len(node.actions):
                out.append(Violation("dup-action", where, "duplicate action labels"))
            if node.player == NATURE:
                if node.dist is None:
                    out.append(Violation("nature-dist-missing", where, "no distribution"))
                else:
                    if len(node.dist) != len(node.actions):
                        out.append(
                            Violation("nature-dist-length", where, "distribution length mismatch")
                        )
                    if any(p < 0 for p in node.dist):
                        out.append(
                            Violation("nature-dist-negative", where, "negative probability")
                        )
                    total = sum(node.dist, Fraction(0))
                    if total != 1:
                        out.append(
                            Violation(
                                "nature-dist-sum",
                                where,
                                f"nature distribution sums to {total}",
                            )
                        )
            else:
                if not (1 <= node.player <= game.provers):
                    out.append(
                        Violation("bad-prover", where, f"player {node.player} out of range")
                    )
                if node.dist is not None:
                    out.append(Violation("dist-on-prover", where, "prover node has a distribution"))
        else:
            if len(node.payments) != game.provers:
                out.append(Violation("payment-length", where, "payment vector length mismatch"))
            for j, r in enumerate(node.payments, start=1):
                if not (-1 <= r <= 1):
                    out.append(
                        Violation(
                            "payment-range", where, f"payment {r} to prover {j} outside [-1,1]"
                        )
                    )
            total = sum(node.payments, Fraction(0))
            if not (-1 <= total <= 1):
                out.append(
                    Violation("total-range", where, f"total payment {total} outside [-1,1]")
                )
            if node.answer_bit not in (0, 1):
                out.append(Violation("bad-answer-bit", where, f"answer bit {node.answer_bit}"))

    # Information partition: every prover decision history in exactly one set,
    # member action lists identical to the node's.
    seen: dict[History, str] = {}
    for iset in game.info_sets:
        key = iset.key
        if not iset.members:
            out.append(Violation("empty-set", key, "information set with no members"))
            continue
        if iset.owner == NATURE or not (1 <= iset.owner <= game.provers):
            out.append(Violation("bad-owner", key, f"owner {iset.owner} invalid"))
        if tuple(sorted(iset.members)) != iset.members:
            out.append(Violation("unsorted-members", key, "members not in canonical order"))
        for h in iset.members:
            if h in seen:
                out.append(
                    Violation("set-overlap", key, f"history {path_of(h)!r} in two sets")
                )
            seen[h] = key
            node = game.nodes.get(h)
            if node is None:
                out.append(Violation("set-member-missing", key, f"member {path_of(h)!r} missing"))
            elif not (isinstance(node, DecisionNode) and node.player == iset.owner):
                out.append(
                    Violation(
                        "set-member-mismatch",
                        key,
                        f"member {path_of(h)!r} is not a decision node of prover {iset.owner}",
                    )
                )
            elif node.actions != iset.actions:
                out.append(
                    Violation(
                        "set-action-mismatch",
                        key,
                        f"member {path_of(h)!r} has different available actions",
                    )
                )
    for h in sorted(game.nodes):
        node = game.nodes[h]
        if isinstance(node, DecisionNode) and node.player != NATURE and h not in seen:
            out.append(
                Violation(
                    "unpartitioned-history",
                    path_of(h),
                    "prover decision history belongs to no information set",
                )
            )
    return ValidationReport(tuple(out))


def player_experience(game: GameTree, player: int, h: History) -> tuple:
    """The (information set, action) pairs `player` went through along `h`."""
    exp = []
    for k in range(len(h)):
        prefix = h[:k]
        node = game.nodes[prefix]
        if isinstance(node, DecisionNode) and node.player == player:
            iset = game.set_by_history.get(prefix)
            key = iset.key if iset is not None else f"?{path_of(prefix)}"
            exp.append((key, h[k]))
    return tuple(exp)


def check_perfect_recall(game: GameTree) -> ValidationReport:
    """Empty iff all members of every set give the owner an identical experience."""
    out: list[Violation] = []
    for iset in game.info_sets:
        base = player_experience(game, iset.owner, iset.members[0])
        for h in iset.members[1:]:
            if player_experience(game, iset.owner, h) != base:
                out.append(
                    Violation(
                        "imperfect-recall",
                        iset.key,
                        f"members {path_of(iset.members[0])!r} and {path_of(h)!r} give "
                        f"prover {iset.owner} different experiences",
                    )
                )
                break
    return ValidationReport(tuple(out))


def require_total_profile(game: GameTree, s: StrategyProfile) -> None:
    for iset in game.info_sets:
        a = s.action(iset.key)  # raises if missing
        if a not in iset.actions:
            raise ProfileError(
                f"action {a!r} not available at information set {iset.key!r}"
            )


def _step_probability(game: GameTree, s: StrategyProfile, prefix: History, action: str) -> Fraction:
    node = game.nodes[prefix]
    assert isinstance(node, DecisionNode)
    if node.player == NATURE:
        return node.dist[node.actions.index(action)]
    iset = game.set_by_history[prefix]
    return Fraction(1) if s.action(iset.key) == action else Fraction(0)


def reach_probability(game: GameTree, s: StrategyProfile, h: History) -> Fraction:
    """Product of Nature probabilities and prover action-match indicators along `h`."""
    if h not in game.nodes:
        raise UnknownHistoryError(f"history {path_of(h)!r} not in game")
    prob = Fraction(1)
    for k in range(len(h)):
        prob *= _step_probability(game, s, h[:k], h[k])
        if prob == 0:
            return Fraction(0)
    return prob


def reach_map(game: GameTree, s: StrategyProfile) -> dict[History, Fraction]:
    """Reach probability of every history under `s`, in one top-down pass."""
    out: dict[History, Fraction] = {(): Fraction(1)}
    for h in game.topo_order:
        node = game.nodes[h]
        if isinstance(node, TerminalNode):
            continue
        base = out[h]
        for a in node.actions:
            out[h + (a,)] = base * _step_probability(game, s, h, a) if base else Fraction(0)
    return out


def continuation_values(
    game: GameTree, s: StrategyProfile
) -> dict[History, tuple[Fraction, ...]]:
    """Per-history expected payment vector when play below follows `s` and Nature."""
    out: dict[History, tuple[Fraction, ...]] = {}
    for h in reversed(game.topo_order):
        node = game.nodes[h]
        if isinstance(node, TerminalNode):
            out[h] = node.payments
        elif node.player == NATURE:
            acc = [Fraction(0)] * game.provers
            for a, p in zip(node.actions, node.dist):
                child = out[h + (a,)]
                for j in range(game.provers):
                    acc[j] += p * child[j]
            out[h] = tuple(acc)
        else:
            chosen = s.action(game.set_by_history[h].key)
            out[h] = out[h + (chosen,)]
    return out


def expected_utility(game: GameTree, s: StrategyProfile, prover: int) -> Fraction:
    """Expected payment of `prover` from the root under `s`."""
    if not (1 <= prover <= game.provers):
        raise ProfileError(f"prover {prover} out of range 1..{game.provers}")
    return continuation_values(game, s)[()][prover - 1]


def utility_vector(game: GameTree, s: StrategyProfile) -> tuple[Fraction, ...]:
    return continuation_values(game, s)[()]


Anchor = Union[History, tuple[InformationSet, Mapping[History, Fraction]]]


def check_belief(iset: InformationSet, belief: Mapping[History, Fraction]) -> None:
    members = set(iset.members)
    if any(h not in members for h in belief):
        raise BeliefError(f"belief names histories outside set {iset.key!r}")
    if any(p < 0 for p in belief.values()):
        raise BeliefError("belief has a negative entry")
    if sum(belief.values(), Fraction(0)) != 1:
        raise BeliefError("belief does not sum to 1")


def conditional_utility(
    game: GameTree, s: StrategyProfile, prover: int, anchor: Anchor
) -> Fraction:
    """Expected payment of `prover` below `anchor` with later moves by `s` and Nature.

    The anchor is either a history (point conditioning) or a pair of an
    information set and a belief over its members.
    """
    values = continuation_values(game, s)
    if isinstance(anchor, tuple) and len(anchor) == 2 and isinstance(anchor[0], InformationSet):
        iset, belief = anchor
        check_belief(iset, belief)
        return sum(
            (p * values[h][prover - 1] for h, p in belief.items()), Fraction(0)
        )
    if anchor not in game.nodes:
        raise UnknownHistoryError(f"history {path_of(anchor)!r} not in game")
    return values[anchor][prover - 1]


def make_game(
    provers: int,
    nodes: Mapping[History, Node],
    info_sets: Iterable[InformationSet] | None = None,
    meta: Mapping[str, Any] | None = None,
) -> GameTree:
    """Assemble a GameTree; with `info_sets=None` every prover node is a singleton set."""
    node_map = dict(nodes)
    if info_sets is None:
        sets = []
        for h in sorted(node_map):
            node = node_map[h]
            if isinstance(node, DecisionNode) and node.player != NATURE:
                sets.append(InformationSet(node.player, (h,), node.actions))
        info_sets = sets
    return GameTree(provers, node_map, tuple(info_sets), dict(meta or {}))


def group_info_sets(
    provers_nodes: Mapping[History, Node], signal: Mapping[History, Any]
) -> tuple[InformationSet, ...]:
    """Group prover decision histories by (owner, signal) into information sets."""
    buckets: dict[tuple, list[History]] = {}
    for h, node in provers_nodes.items():
        if isinstance(node, DecisionNode) and node.player != NATURE:
            buckets.setdefault((node.player, signal[h]), []).append(h)
    sets = []
    for (owner, _), members in sorted(buckets.items(), key=lambda kv: str(kv[0])):
        members = tuple(sorted(members))
        actions = provers_nodes[members[0]].actions
        sets.append(InformationSet(owner, members, actions))
    return tuple(sets)


def all_profiles(game: GameTree, cap: int | None = None):
    """Iterate every pure profile in canonical action order; `cap` guards the product."""
    from .errors import CapExceededError

    sets = game.sorted_sets
    count = 1
    for iset in sets:
        count *= len(iset.actions)
    if cap is not None and count > cap:
        raise CapExceededError(f"{count} profiles exceed cap {cap}", count)
    keys = [iset.key for iset in sets]
    for combo in itertools.product(*(iset.actions for iset in sets)):
        yield StrategyProfile(tuple(sorted(zip(keys, combo))))


def profile_space_size(game: GameTree) -> int:
    n = 1
    for iset in game.info_sets:
        n *= len(iset.actions)
    return n
