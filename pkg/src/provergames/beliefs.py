"""Beliefs at information sets: Bayes' rule where possible, limit beliefs elsewhere.

Limit beliefs come from perturbing the pure profile: every unchosen action gets
probability eps split evenly, chosen actions keep 1-eps. The probability of a
member history is then c_h * eps^e_h * (1-eps)^f_h and the eps->0 limit keeps
only the members with the minimum eps-exponent. Zero-probability Nature
branches (they arise only in pruned games) are treated like unchosen player
actions so the construction stays total.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import BeliefError
from .trees import (
    NATURE,
    DecisionNode,
    GameTree,
    History,
    InformationSet,
    StrategyProfile,
    continuation_values,
    reach_map,
    require_total_profile,
)


@dataclass(frozen=True)
class BeliefSystem:
    """Per information set: a distribution over members, in member order."""

    distributions: tuple[tuple[str, tuple[Fraction, ...]], ...]  # sorted by set key

    @classmethod
    def from_dict(cls, mapping: Mapping[str, tuple[Fraction, ...]]) -> "BeliefSystem":
        return cls(tuple(sorted((k, tuple(v)) for k, v in mapping.items())))

    def as_dict(self) -> dict[str, tuple[Fraction, ...]]:
        return dict(self.distributions)

    def at(self, iset: InformationSet) -> dict[History, Fraction]:
        probs = dict(self.distributions).get(iset.key)
        if probs is None:
            raise BeliefError(f"no belief recorded for set {iset.key!r}")
        return dict(zip(iset.members, probs))


@dataclass(frozen=True)
class MemberTrace:
    history: History
    c: Fraction
    e: int
    f: int


@dataclass(frozen=True)
class SetTrace:
    set_key: str
    members: tuple[MemberTrace, ...]
    d: int
    b_d: Fraction


@dataclass(frozen=True)
class LimitBeliefTrace:
    sets: tuple[SetTrace, ...]


def reachable_sets(
    game: GameTree, s: StrategyProfile
) -> dict[InformationSet, Fraction]:
    """Information sets reached with positive probability under `s`, with the probability."""
    require_total_profile(game, s)
    reach = reach_map(game, s)
    out: dict[InformationSet, Fraction] = {}
    for iset in game.sorted_sets:
        p = sum((reach[h] for h in iset.members), Fraction(0))
        if p > 0:
            out[iset] = p
    return out


def bayes_beliefs(
    game: GameTree, s: StrategyProfile, iset: InformationSet
) -> dict[History, Fraction]:
    """Bayes posterior over members; error at unreachable sets."""
    reach = reach_map(game, s)
    total = sum((reach[h] for h in iset.members), Fraction(0))
    if total == 0:
        raise BeliefError(
            f"Bayes undefined: set {iset.key!r} unreachable under the profile"
        )
    return {h: reach[h] / total for h in iset.members}


def _member_perturbation(game: GameTree, s: StrategyProfile, h: History):
    """(c, e, f) bookkeeping for one member under the eps-perturbed profile."""
    c, e, f = Fraction(1), 0, 0
    for k in range(len(h)):
        prefix, a = h[:k], h[k]
        node = game.nodes[prefix]
        assert isinstance(node, DecisionNode)
        if node.player == NATURE:
            zero_actions = sum(1 for p in node.dist if p == 0)
            p = node.dist[node.actions.index(a)]
            if p > 0:
                c *= p
                if zero_actions:
                    f += 1
            else:
                e += 1
                c *= Fraction(1, zero_actions)
        else:
            iset = game.set_by_history[prefix]
            if s.action(iset.key) == a:
                # A pure strategy is completely mixed only at one-action sets.
                if len(iset.actions) >= 2:
                    f += 1
            else:
                e += 1
                c *= Fraction(1, len(iset.actions) - 1)
    return c, e, f


def limit_beliefs(
    game: GameTree, s: StrategyProfile
) -> tuple[BeliefSystem, LimitBeliefTrace]:
    """Belief system making `s` sequentially rational wherever `s` is an SSE.

    Reachable sets come out exactly equal to Bayes' rule; unreachable sets get
    the limit of the perturbed posteriors.
    """
    require_total_profile(game, s)
    dists: dict[str, tuple[Fraction, ...]] = {}
    traces = []
    for iset in game.sorted_sets:
        members = []
        for h in iset.members:
            c, e, f = _member_perturbation(game, s, h)
            members.append(MemberTrace(h, c, e, f))
        d = min(m.e for m in members)
        b_d = sum((m.c for m in members if m.e == d), Fraction(0))
        dists[iset.key] = tuple(
            m.c / b_d if m.e == d else Fraction(0) for m in members
        )
        traces.append(SetTrace(iset.key, tuple(members), d, b_d))
    return BeliefSystem.from_dict(dists), LimitBeliefTrace(tuple(traces))


@dataclass(frozen=True)
class RationalityViolation:
    set_key: str
    current: str
    better: str
    delta: Fraction


@dataclass(frozen=True)
class RationalityReport:
    verdict: bool
    violations: tuple[RationalityViolation, ...]


def verify_sequential_rationality(
    game: GameTree, s: StrategyProfile, mu: BeliefSystem
) -> RationalityReport:
    """One-shot optimality of `s` at every set under the supplied beliefs."""
    require_total_profile(game, s)
    values = continuation_values(game, s)
    violations = []
    for iset in game.sorted_sets:
        belief = mu.at(iset)  # raises if mu does not cover the set
        owner = iset.owner
        chosen = s.action(iset.key)

        def value(action: str) -> Fraction:
            return sum(
                (p * values[h + (action,)][owner - 1] for h, p in belief.items()),
                Fraction(0),
            )

        base = value(chosen)
        for a in iset.actions:
            if a == chosen:
                continue
            delta = value(a) - base
            if delta > 0:
                violations.append(RationalityViolation(iset.key, chosen, a, delta))
    return RationalityReport(not violations, tuple(violations))
