"""Utility-gap measurement: splices, witnesses, whole-protocol verification.

A wrong-answer profile is robustly punished when some subform it still reaches
contains a prover who deviated there and would gain more than the gap
threshold by switching back to the dominant play inside that subform, holding
everything outside fixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CapExceededError, GameError
from .trees import (
    GameTree,
    StrategyProfile,
    TerminalNode,
    all_profiles,
    profile_space_size,
    reach_map,
    require_total_profile,
    utility_vector,
)
from .subforms import Subform, find_subforms, sets_in


def answer_bit_distribution(
    game: GameTree, s: StrategyProfile
) -> dict[int, Fraction]:
    """Probability of each terminal answer bit under `s` and Nature."""
    require_total_profile(game, s)
    reach = reach_map(game, s)
    out = {0: Fraction(0), 1: Fraction(0)}
    for h in game.terminals:
        node = game.nodes[h]
        assert isinstance(node, TerminalNode)
        out[node.answer_bit] += reach[h]
    return out


def splice(
    game: GameTree,
    s_prime: StrategyProfile,
    sf: Subform,
    s_star: StrategyProfile,
) -> StrategyProfile:
    """`s_star` at every information set inside the subform, `s_prime` elsewhere."""
    require_total_profile(game, s_prime)
    require_total_profile(game, s_star)
    inside = {iset.key for iset in sets_in(game, sf)}
    return StrategyProfile(
        tuple(
            sorted(
                (key, s_star.action(key) if key in inside else action)
                for key, action in s_prime.choices
            )
        )
    )


def _subform_reachable(game: GameTree, s: StrategyProfile, sf: Subform) -> bool:
    if sf.root_set is None:
        return True
    reach = reach_map(game, s)
    return sum((reach[h] for h in sf.root_set.members), Fraction(0)) > 0


def _deviators_inside(
    game: GameTree, s_prime: StrategyProfile, s_star: StrategyProfile, sf: Subform
) -> tuple[int, ...]:
    """Provers acting in the subform whose choices differ from s_star inside it."""
    out = set()
    for iset in sets_in(game, sf):
        if s_prime.action(iset.key) != s_star.action(iset.key):
            out.add(iset.owner)
    return tuple(sorted(out))


@dataclass(frozen=True)
class GapWitness:
    subform_key: str
    prover: int
    loss: Fraction


def find_gap_witness(
    game: GameTree,
    s_star: StrategyProfile,
    s_prime: StrategyProfile,
    alpha: Fraction | int,
) -> GapWitness | None:
    """First subform/prover pair whose splice gain exceeds 1/alpha, scanning
    subforms in canonical (height-ascending) order."""
    threshold = Fraction(1) / Fraction(alpha)
    base = utility_vector(game, s_prime)
    reach = reach_map(game, s_prime)
    for sf in find_subforms(game):
        if sf.root_set is not None and not any(
            reach[h] > 0 for h in sf.root_set.members
        ):
            continue
        spliced_vec = None
        for j in _deviators_inside(game, s_prime, s_star, sf):
            if spliced_vec is None:
                spliced_vec = utility_vector(game, splice(game, s_prime, sf, s_star))
            loss = spliced_vec[j - 1] - base[j - 1]
            if loss > threshold:
                return GapWitness(sf.key, j, loss)
    return None


def check_gap_closeness(
    game: GameTree,
    s: StrategyProfile,
    s_star: StrategyProfile,
    alpha: Fraction | int,
) -> bool:
    """True when no prover acting in a subform reached under `s` would gain
    1/alpha or more from the dominant play spliced into that subform."""
    threshold = Fraction(1) / Fraction(alpha)
    base = utility_vector(game, s)
    reach = reach_map(game, s)
    for sf in find_subforms(game):
        if sf.root_set is not None and not any(
            reach[h] > 0 for h in sf.root_set.members
        ):
            continue
        spliced_vec = utility_vector(game, splice(game, s, sf, s_star))
        for iset in sets_in(game, sf):
            gain = spliced_vec[iset.owner - 1] - base[iset.owner - 1]
            if gain >= threshold:
                return False
    return True


@dataclass(frozen=True)
class WrongProfileRow:
    profile: tuple[tuple[str, str], ...]
    max_loss: Fraction
    witness_subform: str
    witness_prover: int


@dataclass(frozen=True)
class GapReport:
    verdict: bool
    alpha: Fraction
    threshold: Fraction
    wrong_profiles: int
    measured_gap: Fraction | None  # min over wrong profiles of the max loss
    worst: WrongProfileRow | None

    @property
    def table(self) -> tuple[WrongProfileRow, ...]:
        return (self.worst,) if self.worst is not None else ()


def verify_utility_gap(
    game: GameTree,
    s_star: StrategyProfile,
    alpha: Fraction | int,
    correct_bit: int,
    cap: int | None = None,
) -> GapReport:
    """Scan every pure profile with a wrong answer bit for a gap witness.

    The measured gap is the minimum over wrong profiles of the best available
    splice loss; the protocol has the claimed gap iff that minimum exceeds
    1/alpha.
    """
    from .equilibrium import DEFAULT_PROFILE_CAP

    if correct_bit not in (0, 1):
        raise GameError(f"correct_bit must be 0 or 1, got {correct_bit}")
    threshold = Fraction(1) / Fraction(alpha)
    cap = cap if cap is not None else DEFAULT_PROFILE_CAP
    size = profile_space_size(game)
    if size > cap:
        raise CapExceededError(f"{size} profiles exceed cap {cap}", size)

    subs = find_subforms(game)
    sets_inside = {sf.key: sets_in(game, sf) for sf in subs}
    verdict = True
    wrong = 0
    measured: Fraction | None = None
    worst: WrongProfileRow | None = None
    for s in all_profiles(game):
        reach = reach_map(game, s)
        correct_mass = sum(
            (
                reach[t]
                for t in game.terminals
                if game.nodes[t].answer_bit == correct_bit
            ),
            Fraction(0),
        )
        if correct_mass == 1:
            continue
        wrong += 1
        base = utility_vector(game, s)
        best_loss: Fraction | None = None
        best_at: tuple[str, int] | None = None
        for sf in subs:
            if sf.root_set is not None and not any(
                reach[h] > 0 for h in sf.root_set.members
            ):
                continue
            deviators = sorted(
                {
                    iset.owner
                    for iset in sets_inside[sf.key]
                    if s.action(iset.key) != s_star.action(iset.key)
                }
            )
            if not deviators:
                continue
            spliced_vec = utility_vector(game, splice(game, s, sf, s_star))
            for j in deviators:
                loss = spliced_vec[j - 1] - base[j - 1]
                if best_loss is None or loss > best_loss:
                    best_loss, best_at = loss, (sf.key, j)
        if best_loss is None:
            # A wrong profile with no deviation anywhere cannot exist.
            raise GameError("wrong-bit profile identical to the dominant SSE")
        if best_loss <= threshold:
            verdict = False
        if measured is None or best_loss < measured:
            measured = best_loss
            worst = WrongProfileRow(s.choices, best_loss, best_at[0], best_at[1])
    return GapReport(verdict, Fraction(alpha), threshold, wrong, measured, worst)


@dataclass(frozen=True)
class SubintervalViolation:
    profile: tuple[tuple[str, str], ...]
    dominant_interval: tuple[int, ...]
    profile_interval: tuple[int, ...]


@dataclass(frozen=True)
class SubintervalReport:
    alpha: int
    checked: int  # SSEs failing the closeness test
    violations: tuple[SubintervalViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def subinterval_index(value: Fraction, alpha: int) -> int:
    """Index of the width-1/(4*alpha) subinterval of [-1,1] containing `value`."""
    if not (-1 <= value <= 1):
        raise GameError(f"value {value} outside [-1,1]")
    if value == 1:
        return 4 * alpha - 1
    return (4 * alpha * value).__floor__()


def subinterval_profile_check(
    game: GameTree,
    alpha: int,
    sse_set: list[StrategyProfile],
    s_star: StrategyProfile | None = None,
) -> SubintervalReport:
    """Every SSE failing the closeness test must sit in a different subinterval
    profile than the dominant SSE, in at least one prover's coordinate."""
    from .subforms import dominant_sse_set

    if s_star is None:
        dominants = dominant_sse_set(game, sse_set)
        if not dominants:
            raise GameError("no dominant SSE; subinterval check undefined")
        s_star = dominants[0]
    star_vec = utility_vector(game, s_star)
    star_intervals = tuple(subinterval_index(u, alpha) for u in star_vec)
    checked = 0
    violations = []
    for s in sse_set:
        if check_gap_closeness(game, s, s_star, alpha):
            continue
        checked += 1
        vec = utility_vector(game, s)
        intervals = tuple(subinterval_index(u, alpha) for u in vec)
        if intervals == star_intervals:
            violations.append(
                SubintervalViolation(s.choices, star_intervals, intervals)
            )
    return SubintervalReport(alpha, checked, tuple(violations))
