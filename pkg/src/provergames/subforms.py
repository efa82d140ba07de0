"""Subforms and dominant strong sequential equilibria.

A subform is an information set together with every history following it,
subject to closure: any information set touching those histories must lie
wholly inside them, so the players acting there share no information asymmetry
with the outside. The whole game always counts as a subform. Dominance between
equilibria is decided by induction on subform height: on height-1 subforms a
dominant profile must weakly dominate every SSE, on taller ones every SSE that
is itself dominant on all strictly lower subforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .equilibrium import DEFAULT_PROFILE_CAP, enumerate_sse, is_sse
from .errors import CapExceededError, GameError, StructureError
from .trees import (
    NATURE,
    DecisionNode,
    GameTree,
    History,
    InformationSet,
    StrategyProfile,
    TerminalNode,
    continuation_values,
    profile_space_size,
    reach_map,
    require_total_profile,
)

WHOLE_GAME_KEY = "<game>"
DEFAULT_CLASS_CAP = 4096


@dataclass(frozen=True)
class Subform:
    root_set: InformationSet | None  # None marks the whole game
    histories: frozenset[History]
    height: int

    @property
    def key(self) -> str:
        return WHOLE_GAME_KEY if self.root_set is None else self.root_set.key


def find_subforms(game: GameTree) -> list[Subform]:
    """All subforms, sorted by height ascending (whole game last at its height)."""
    all_hist = frozenset(game.nodes)
    terminals = game.terminals
    subs: list[Subform] = []
    for iset in game.sorted_sets:
        members = iset.members
        following = frozenset(
            h
            for h in all_hist
            if any(h[: len(m)] == m for m in members)
        )
        closed = all(
            set(other.members) <= following or not (set(other.members) & following)
            for other in game.info_sets
        )
        if not closed:
            continue
        if following == all_hist and members == ((),):
            continue  # coincides with the whole-game subform added below
        height = 0
        for t in terminals:
            if t in following:
                m = next(m for m in members if t[: len(m)] == m)
                height = max(height, len(t) - len(m))
        subs.append(Subform(iset, following, height))
    subs.append(Subform(None, all_hist, game.height))
    subs.sort(key=lambda sf: (sf.height, sf.key))
    return subs


def actors_in(game: GameTree, sf: Subform) -> tuple[int, ...]:
    """Provers owning an information set wholly inside the subform."""
    owners = {
        iset.owner
        for iset in game.info_sets
        if set(iset.members) <= sf.histories
    }
    return tuple(sorted(owners))


def sets_in(game: GameTree, sf: Subform) -> tuple[InformationSet, ...]:
    return tuple(
        iset for iset in game.sorted_sets if set(iset.members) <= sf.histories
    )


def conditional_game(
    game: GameTree, sf: Subform, belief: dict[History, Fraction]
) -> GameTree:
    """The subform as a standalone game: Nature plays `belief` into the members."""
    members = ((),) if sf.root_set is None else sf.root_set.members
    if set(belief) - set(members):
        raise GameError("belief names histories outside the subform root set")
    if any(p < 0 for p in belief.values()) or sum(belief.values(), Fraction(0)) != 1:
        raise GameError("belief is not a probability distribution")

    labels = tuple(f"m{i}" for i in range(len(members)))
    dist = tuple(belief.get(m, Fraction(0)) for m in members)
    nodes: dict[History, object] = {(): DecisionNode(NATURE, labels, dist)}
    remap: dict[History, History] = {}
    for i, m in enumerate(members):
        for h in game.nodes:
            if h[: len(m)] == m:
                new_h = (labels[i],) + h[len(m):]
                nodes[new_h] = game.nodes[h]
                remap[h] = new_h
    new_sets = []
    for iset in game.info_sets:
        inside = [h for h in iset.members if h in remap]
        if not inside:
            continue
        if len(inside) != len(iset.members):
            raise StructureError(
                f"information set {iset.key!r} straddles the subform boundary"
            )
        new_sets.append(
            InformationSet(
                iset.owner, tuple(sorted(remap[h] for h in inside)), iset.actions
            )
        )
    meta = {"conditional_of": sf.key, "member_labels": {labels[i]: "/".join(members[i]) for i in range(len(members))}}
    return GameTree(game.provers, nodes, tuple(new_sets), meta)


class _ProfileData:
    """Continuation values and reach probabilities, computed once per profile."""

    def __init__(self, game: GameTree, s: StrategyProfile):
        self.values = continuation_values(game, s)
        self.reach = reach_map(game, s)


def _dominates(
    game: GameTree,
    d1: _ProfileData,
    d2: _ProfileData,
    sf: Subform,
    actors: tuple[int, ...],
) -> bool:
    if not actors:
        return True
    if sf.root_set is None:
        return all(d1.values[()][j - 1] >= d2.values[()][j - 1] for j in actors)
    iset = sf.root_set
    total1 = sum((d1.reach[h] for h in iset.members), Fraction(0))
    total2 = sum((d2.reach[h] for h in iset.members), Fraction(0))
    if total1 > 0 and total2 > 0:
        for j in actors:
            v1 = sum(
                (d1.reach[h] / total1 * d1.values[h][j - 1] for h in iset.members),
                Fraction(0),
            )
            v2 = sum(
                (d2.reach[h] / total2 * d2.values[h][j - 1] for h in iset.members),
                Fraction(0),
            )
            if v1 < v2:
                return False
        return True
    return all(
        d1.values[h][j - 1] >= d2.values[h][j - 1] for h in iset.members for j in actors
    )


def dominates_on_subform(
    game: GameTree, s: StrategyProfile, s2: StrategyProfile, sf: Subform
) -> bool:
    """Weak dominance of `s` over `s2` on the subform, per prover acting within.

    Each side is evaluated in the conditional game under its own Bayes beliefs
    at the root set; if either profile leaves the root set unreached, the
    comparison is made pointwise at every member history instead.
    """
    require_total_profile(game, s)
    require_total_profile(game, s2)
    return _dominates(
        game, _ProfileData(game, s), _ProfileData(game, s2), sf, actors_in(game, sf)
    )


@dataclass(frozen=True)
class SubformComparison:
    subform_key: str
    height: int
    compared: int
    failed_against: tuple[int, ...]  # indices into the supplied SSE list
    evaluated: bool  # False when the candidate was already out at this layer


@dataclass(frozen=True)
class DominanceCertificate:
    verdict: bool
    trace: tuple[SubformComparison, ...]


def _layered_dominant(
    game: GameTree,
    sse_set: Sequence[StrategyProfile],
    watch: StrategyProfile | None = None,
) -> tuple[list[StrategyProfile], list[SubformComparison]]:
    subs = find_subforms(game)
    actors = {sf.key: actors_in(game, sf) for sf in subs}
    data = [_ProfileData(game, s) for s in sse_set]
    heights = sorted({sf.height for sf in subs})
    current = list(range(len(sse_set)))
    trace: list[SubformComparison] = []
    for k in heights:
        comp = list(range(len(sse_set))) if k == 1 else list(current)
        layer = [sf for sf in subs if sf.height == k]
        watching = watch is not None and any(sse_set[i] == watch for i in current)
        survivors = []
        for i in current:
            ok = True
            for sf in layer:
                failed = tuple(
                    j
                    for j in comp
                    if not _dominates(game, data[i], data[j], sf, actors[sf.key])
                )
                if watch is not None and sse_set[i] == watch:
                    trace.append(
                        SubformComparison(sf.key, k, len(comp), failed, True)
                    )
                if failed:
                    ok = False
            if ok:
                survivors.append(i)
        if watch is not None and not watching:
            for sf in layer:
                trace.append(SubformComparison(sf.key, k, len(comp), (), False))
        current = survivors
    return [sse_set[i] for i in current], trace


def dominant_sse_set(
    game: GameTree, sse_set: Sequence[StrategyProfile]
) -> list[StrategyProfile]:
    """The SSEs surviving the full height induction, in input order."""
    survivors, _ = _layered_dominant(game, sse_set)
    return survivors


def is_dominant_sse(
    game: GameTree, s: StrategyProfile, sse_set: Sequence[StrategyProfile]
) -> DominanceCertificate:
    if not is_sse(game, s).verdict:
        raise GameError("profile is not an SSE; dominance is undefined")
    if s not in list(sse_set):
        raise GameError("profile is not a member of the supplied SSE set")
    survivors, trace = _layered_dominant(game, sse_set, watch=s)
    return DominanceCertificate(s in survivors, tuple(trace))


# ---------------------------------------------------------------------------
# Perfect-information fast path.
#
# With singleton information sets the Bayes condition at a reached set equals
# the per-history condition, so SSE membership and dominance both decompose by
# subtree. Each node carries equivalence classes of SSE continuations keyed by
# (utility vector, answer distribution); the height induction freezes, per
# decision node, the per-actor maxima of the comparison class and filters.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Class:
    value: tuple[Fraction, ...]
    answers: tuple[tuple[int, Fraction], ...]
    rep: tuple[tuple[str, str], ...]


def _merge_answers(parts: Iterable[tuple[tuple[tuple[int, Fraction], ...], Fraction]]):
    acc: dict[int, Fraction] = {}
    for answers, weight in parts:
        for bit, p in answers:
            acc[bit] = acc.get(bit, Fraction(0)) + weight * p
    return tuple(sorted((b, p) for b, p in acc.items() if p))


def is_perfect_information(game: GameTree) -> bool:
    return all(len(iset.members) == 1 for iset in game.info_sets)


class _PerfectInfoSearch:
    def __init__(self, game: GameTree, class_cap: int):
        self.game = game
        self.class_cap = class_cap
        self.actors_below: dict[History, frozenset[int]] = {}
        self.node_height: dict[History, int] = {}
        for h in sorted(game.nodes, key=len, reverse=True):
            node = game.nodes[h]
            if isinstance(node, TerminalNode):
                self.actors_below[h] = frozenset()
                self.node_height[h] = 0
            else:
                kids = [h + (a,) for a in node.actions]
                owners = frozenset().union(*(self.actors_below[k] for k in kids))
                if node.player != NATURE:
                    owners |= {node.player}
                self.actors_below[h] = owners
                self.node_height[h] = 1 + max(self.node_height[k] for k in kids)
        # per-node frozen dominance filters: prover -> minimum admissible value
        self.filters: dict[History, dict[int, Fraction]] = {}

    def _classes(self, memo: dict, h: History) -> list[_Class]:
        node = self.game.nodes[h]
        if isinstance(node, TerminalNode):
            return [_Class(node.payments, ((node.answer_bit, Fraction(1)),), ())]
        kids = [memo[h + (a,)] for a in node.actions]
        if any(not lst for lst in kids):
            return []
        if node.player == NATURE:
            combos: list[_Class] = [_Class(tuple([Fraction(0)] * self.game.provers), (), ())]
            for lst, p in zip(kids, node.dist):
                nxt: list[_Class] = []
                seen = set()
                for left in combos:
                    for cls in lst:
                        value = tuple(
                            lv + p * cv for lv, cv in zip(left.value, cls.value)
                        )
                        answers = _merge_answers([(left.answers, Fraction(1)), (cls.answers, p)])
                        sig = (value, answers)
                        if sig in seen:
                            continue
                        seen.add(sig)
                        rep = tuple(sorted((dict(left.rep) | dict(cls.rep)).items()))
                        nxt.append(_Class(value, answers, rep))
                        if len(nxt) > self.class_cap:
                            raise CapExceededError(
                                f"continuation classes exceed cap {self.class_cap}",
                                len(nxt),
                            )
                combos = nxt
            out = combos
        else:
            owner = node.player
            set_key = self.game.set_by_history[h].key
            mins = []
            for lst in kids:
                best = min(cls.value[owner - 1] for cls in lst)
                pick = next(cls for cls in lst if cls.value[owner - 1] == best)
                mins.append((best, pick))
            out = []
            seen = set()
            for idx, a in enumerate(node.actions):
                for cls in kids[idx]:
                    mine = cls.value[owner - 1]
                    if any(
                        mins[b][0] > mine for b in range(len(kids)) if b != idx
                    ):
                        continue
                    sig = (cls.value, cls.answers)
                    if sig in seen:
                        continue
                    seen.add(sig)
                    rep = {set_key: a} | dict(cls.rep)
                    for b in range(len(kids)):
                        if b != idx:
                            rep |= dict(mins[b][1].rep)
                    out.append(_Class(cls.value, cls.answers, tuple(sorted(rep.items()))))
        filt = self.filters.get(h)
        if filt:
            out = [
                cls
                for cls in out
                if all(cls.value[j - 1] >= bound for j, bound in filt.items())
            ]
        return out

    def _build(self) -> dict[History, list[_Class]]:
        memo: dict[History, list[_Class]] = {}
        for h in sorted(self.game.nodes, key=len, reverse=True):
            memo[h] = self._classes(memo, h)
        return memo

    def dominant(self) -> StrategyProfile | None:
        base = self._build()
        current = base
        decision_layers = sorted(
            {
                self.node_height[h]
                for h, n in self.game.nodes.items()
                if isinstance(n, DecisionNode) and n.player != NATURE
            }
        )
        for k in decision_layers:
            layer_nodes = [
                h
                for h, n in sorted(self.game.nodes.items())
                if isinstance(n, DecisionNode)
                and n.player != NATURE
                and self.node_height[h] == k
            ]
            for h in layer_nodes:
                comp = base[h] if k == 1 else current[h]
                if not comp:
                    continue
                actors = self.actors_below[h]
                self.filters[h] = {
                    j: max(cls.value[j - 1] for cls in comp) for j in actors
                }
            current = self._build()
        final = current[()]
        root = self.game.nodes[()]
        whole_is_node_subform = (
            isinstance(root, DecisionNode) and root.player != NATURE
        )
        if final and not whole_is_node_subform:
            actors = self.actors_below[()]
            if actors:
                bounds = {j: max(cls.value[j - 1] for cls in final) for j in actors}
                final = [
                    cls
                    for cls in final
                    if all(cls.value[j - 1] >= b for j, b in bounds.items())
                ]
        if not final:
            return None
        profile = StrategyProfile(final[0].rep)
        require_total_profile(self.game, profile)
        return profile


def find_dominant_sse(
    game: GameTree,
    profile_cap: int = DEFAULT_PROFILE_CAP,
    class_cap: int = DEFAULT_CLASS_CAP,
) -> StrategyProfile | None:
    """First dominant SSE in canonical order, or None when none exists.

    Games whose profile space fits the cap go through literal enumeration plus
    the height induction. Larger perfect-information games use the subtree
    class search, which agrees with the literal path wherever both run.
    """
    if profile_space_size(game) <= profile_cap:
        sses = enumerate_sse(game, cap=profile_cap)
        survivors = dominant_sse_set(game, sses)
        return survivors[0] if survivors else None
    if is_perfect_information(game):
        return _PerfectInfoSearch(game, class_cap).dominant()
    raise CapExceededError(
        f"{profile_space_size(game)} profiles exceed cap {profile_cap} and the game "
        "has non-singleton information sets",
        profile_space_size(game),
    )
