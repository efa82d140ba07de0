"""Strong-sequential-equilibrium checking and enumeration.

`is_sse` applies the one-shot deviation principle: at sets reached under the
profile a single action change must not help under the Bayes posterior, and at
unreached sets it must not help conditioned on each member history separately.
`is_sse_bruteforce` re-derives the same verdict from the definition, testing
every full alternative strategy of the acting prover, and serves as the
independent oracle in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping

from .errors import CapExceededError, ImperfectRecallError
from .trees import (
    NATURE,
    GameTree,
    History,
    StrategyProfile,
    TerminalNode,
    all_profiles,
    check_perfect_recall,
    continuation_values,
    profile_space_size,
    reach_map,
    require_total_profile,
    utility_vector,
)

DEFAULT_PROFILE_CAP = 10**7


@dataclass(frozen=True)
class SseViolation:
    set_key: str
    reachable: bool
    history: History | None  # witness member at an unreachable set
    belief: tuple[tuple[History, Fraction], ...] | None  # posterior at a reachable set
    current: str
    better: str
    delta: Fraction


@dataclass(frozen=True)
class SseCertificate:
    verdict: bool
    violations: tuple[SseViolation, ...]
    stats: Mapping[str, int] = field(default_factory=dict, compare=False)


def _require_recall(game: GameTree) -> None:
    report = check_perfect_recall(game)
    if not report.ok:
        raise ImperfectRecallError(
            f"game lacks perfect recall: {report.violations[0].message}"
        )


def is_sse(
    game: GameTree, s: StrategyProfile, *, _assume_recall: bool = False
) -> SseCertificate:
    """One-shot deviation check, a single bottom-up pass over the tree."""
    if not _assume_recall:
        _require_recall(game)
    require_total_profile(game, s)
    values = continuation_values(game, s)
    reach = reach_map(game, s)
    ops = len(game.nodes)  # continuation pass
    violations = []
    for iset in game.sorted_sets:
        owner = iset.owner
        chosen = s.action(iset.key)
        total = sum((reach[h] for h in iset.members), Fraction(0))
        ops += len(iset.members) * len(iset.actions)
        if total > 0:
            belief = {h: reach[h] / total for h in iset.members}
            base = sum(
                (p * values[h + (chosen,)][owner - 1] for h, p in belief.items()),
                Fraction(0),
            )
            for a in iset.actions:
                if a == chosen:
                    continue
                alt = sum(
                    (p * values[h + (a,)][owner - 1] for h, p in belief.items()),
                    Fraction(0),
                )
                if alt > base:
                    violations.append(
                        SseViolation(
                            iset.key,
                            True,
                            None,
                            tuple(sorted(belief.items())),
                            chosen,
                            a,
                            alt - base,
                        )
                    )
        else:
            for h in iset.members:
                base = values[h + (chosen,)][owner - 1]
                for a in iset.actions:
                    if a == chosen:
                        continue
                    alt = values[h + (a,)][owner - 1]
                    if alt > base:
                        violations.append(
                            SseViolation(iset.key, False, h, None, chosen, a, alt - base)
                        )
    return SseCertificate(not violations, tuple(violations), {"ops": ops})


def _value_under(
    game: GameTree,
    h: History,
    prover: int,
    base: StrategyProfile,
    overrides: Mapping[str, str],
) -> Fraction:
    """Expected payment of `prover` from `h`; overrides replace `base` per set key."""
    node = game.nodes[h]
    if isinstance(node, TerminalNode):
        return node.payments[prover - 1]
    if node.player == NATURE:
        return sum(
            (
                p * _value_under(game, h + (a,), prover, base, overrides)
                for a, p in zip(node.actions, node.dist)
                if p
            ),
            Fraction(0),
        )
    key = game.set_by_history[h].key
    action = overrides.get(key, base.action(key))
    return _value_under(game, h + (action,), prover, base, overrides)


def is_sse_bruteforce(game: GameTree, s: StrategyProfile) -> SseCertificate:
    """Definition-level check: every full alternative strategy of each owner.

    Intended for small games; the enumeration at each set runs over all action
    assignments to the owner's sets at or below that set.
    """
    _require_recall(game)
    require_total_profile(game, s)
    reach = reach_map(game, s)
    violations = []
    for iset in game.sorted_sets:
        owner = iset.owner
        # Owner's sets whose members extend a member of `iset` (including itself):
        # only these can move the utility conditioned below `iset`.
        relevant = [
            other
            for other in game.sorted_sets
            if other.owner == owner
            and any(
                m[: len(h)] == h for m in other.members for h in iset.members
            )
        ]
        keys = [other.key for other in relevant]
        assignments = [
            dict(zip(keys, combo))
            for combo in product(*(other.actions for other in relevant))
        ]
        current = {k: s.action(k) for k in keys}
        total = sum((reach[h] for h in iset.members), Fraction(0))
        if total > 0:
            belief = {h: reach[h] / total for h in iset.members}

            def value(overrides: Mapping[str, str]) -> Fraction:
                return sum(
                    (
                        p * _value_under(game, h, owner, s, overrides)
                        for h, p in belief.items()
                    ),
                    Fraction(0),
                )

            base = value(current)
            for overrides in assignments:
                delta = value(overrides) - base
                if delta > 0:
                    violations.append(
                        SseViolation(
                            iset.key,
                            True,
                            None,
                            tuple(sorted(belief.items())),
                            s.action(iset.key),
                            overrides[iset.key],
                            delta,
                        )
                    )
                    break
        else:
            for h in iset.members:
                base = _value_under(game, h, owner, s, current)
                hit = False
                for overrides in assignments:
                    delta = _value_under(game, h, owner, s, overrides) - base
                    if delta > 0:
                        violations.append(
                            SseViolation(
                                iset.key,
                                False,
                                h,
                                None,
                                s.action(iset.key),
                                overrides[iset.key],
                                delta,
                            )
                        )
                        hit = True
                        break
                if hit:
                    break
    return SseCertificate(not violations, tuple(violations))


def enumerate_sse(
    game: GameTree, cap: int = DEFAULT_PROFILE_CAP
) -> list[StrategyProfile]:
    """All pure SSEs, in canonical action-order enumeration."""
    size = profile_space_size(game)
    if size > cap:
        raise CapExceededError(f"{size} profiles exceed cap {cap}", size)
    _require_recall(game)
    return [
        s for s in all_profiles(game) if is_sse(game, s, _assume_recall=True).verdict
    ]


def max_total_utility_sse(
    game: GameTree, sse_set: list[StrategyProfile]
) -> tuple[StrategyProfile, bool]:
    """The SSE maximizing total utility, flagged when it weakly dominates per player.

    Ties break by position in `sse_set` (canonical enumeration order).
    """
    if not sse_set:
        raise ValueError("sse_set must be nonempty")
    vectors = [utility_vector(game, s) for s in sse_set]
    best_idx = 0
    best_total = sum(vectors[0], Fraction(0))
    for i in range(1, len(sse_set)):
        total = sum(vectors[i], Fraction(0))
        if total > best_total:
            best_idx, best_total = i, total
    best_vec = vectors[best_idx]
    dominant = all(
        all(best_vec[j] >= vec[j] for j in range(game.provers)) for vec in vectors
    )
    return sse_set[best_idx], dominant
