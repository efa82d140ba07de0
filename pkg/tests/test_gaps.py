from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from provergames.equilibrium import enumerate_sse
from provergames.errors import GameError
from provergames.gaps import (
    answer_bit_distribution,
    check_gap_closeness,
    find_gap_witness,
    splice,
    subinterval_index,
    subinterval_profile_check,
    verify_utility_gap,
)
from provergames.subforms import Subform, dominant_sse_set, find_subforms
from provergames.trees import (
    DecisionNode,
    NATURE,
    StrategyProfile,
    TerminalNode,
    make_game,
)

from randgames import random_game


class TestAnswerBitDistribution:
    def test_deterministic_path(self, k3):
        assert answer_bit_distribution(k3.game, k3.honest) == {0: F(0), 1: F(1)}

    def test_fair_nature_split(self):
        nodes = {
            (): DecisionNode(NATURE, ("x", "y"), (F(1, 2), F(1, 2))),
            ("x",): TerminalNode((F(0),), 0),
            ("y",): TerminalNode((F(0),), 1),
        }
        game = make_game(1, nodes)
        assert answer_bit_distribution(game, StrategyProfile(())) == {
            0: F(1, 2),
            1: F(1, 2),
        }


class TestSplice:
    def test_whole_game_returns_star(self, mini_coloring):
        game = mini_coloring.game
        whole = next(sf for sf in find_subforms(game) if sf.root_set is None)
        sses = enumerate_sse(game)
        other = next(s for s in sses if s != mini_coloring.honest)
        assert splice(game, other, whole, mini_coloring.honest) == mini_coloring.honest

    def test_setless_subform_returns_prime(self, mini_coloring):
        game = mini_coloring.game
        hollow = Subform(None, frozenset({("no",)}), 1)
        sses = enumerate_sse(game)
        other = next(s for s in sses if s != mini_coloring.honest)
        assert splice(game, other, hollow, mini_coloring.honest) == other

    def test_pnexp_splice_changes_only_subform_sets(self, pnexp_toy):
        game, honest = pnexp_toy.game, pnexp_toy.honest
        target = next(
            i
            for i in game.info_sets
            if i.actions == ("c*=0", "c*=1") and ("ans:1;10", "i=2") in i.members
        )
        sf = next(
            sf
            for sf in find_subforms(game)
            if sf.root_set is not None and sf.root_set.key == target.key
        )
        liar = honest.replace(target.key, "c*=1")
        spliced = splice(game, liar, sf, honest)
        assert spliced == honest  # the only deviation sat inside the subform
        root_lie = honest.replace(game.set_by_history[()].key, "ans:0;00")
        spliced = splice(game, root_lie, sf, honest)
        assert spliced == root_lie  # root set is outside the subform


class TestFindGapWitness:
    def test_sat_instance_wrong_bit_loses_half(self, nexp_sat):
        game, scale = nexp_sat.game, nexp_sat.scale
        s_prime = nexp_sat.honest.replace(game.set_by_history[()].key, "c=0")
        alpha_scaled = F(4) / scale  # pre-scale threshold 1/4 < the 1/2 loss
        w = find_gap_witness(game, nexp_sat.honest, s_prime, alpha_scaled)
        assert w is not None
        assert w.subform_key == "<game>"  # witnessed at the whole game
        assert w.prover == 1
        assert w.loss / scale == F(1, 2)

    def test_unsat_third_loss_five_sixths(self, nexp_unsat_third):
        game, scale = nexp_unsat_third.game, nexp_unsat_third.scale
        s_prime = nexp_unsat_third.honest.replace(game.set_by_history[()].key, "c=1")
        alpha_scaled = F(6, 5) / scale
        w = find_gap_witness(game, nexp_unsat_third.honest, s_prime, F(2) / scale)
        assert w is not None and w.loss / scale == F(5, 6)
        # Strict threshold: at exactly 6/5 the 5/6 loss does not qualify.
        assert find_gap_witness(game, nexp_unsat_third.honest, s_prime, alpha_scaled) is None

    def test_star_profile_has_no_witness(self, nexp_sat):
        w = find_gap_witness(nexp_sat.game, nexp_sat.honest, nexp_sat.honest, 10**6)
        assert w is None


class TestVerifyUtilityGap:
    def test_mini_coloring_constant_gap(self, mini_coloring):
        game, scale = mini_coloring.game, mini_coloring.scale
        s_star = dominant_sse_set(game, enumerate_sse(game))[0]
        report = verify_utility_gap(game, s_star, F(2) / scale, mini_coloring.correct_bit)
        assert report.verdict
        # Every wrong-bit profile forfeits at least the one-dollar claim edge.
        assert report.measured_gap / scale == F(1)

    def test_nexp_gap_formula(self):
        from provergames import build_nexp_protocol, fixed_soundness_mip

        for accepting, total in [(1, 3), (1, 2), (1, 4)]:
            build = build_nexp_protocol(fixed_soundness_mip(accepting, total))
            rho = F(accepting, total)
            game, scale = build.game, build.scale
            s_star = dominant_sse_set(game, enumerate_sse(game))[0]
            report = verify_utility_gap(game, s_star, F(100) / scale, build.correct_bit)
            assert report.measured_gap / scale == F(1, 2) - (2 * rho - 1)

    def test_monotone_in_alpha(self, nexp_unsat_third):
        game, scale = nexp_unsat_third.game, nexp_unsat_third.scale
        s_star = nexp_unsat_third.honest
        verdicts = []
        for alpha in (F(6, 5), F(2), F(10)):
            report = verify_utility_gap(game, s_star, alpha / scale, 0)
            verdicts.append(report.verdict)
        # once true, stays true as alpha grows (threshold shrinks)
        assert verdicts == sorted(verdicts)

    def test_bad_bit_rejected(self, nexp_sat):
        with pytest.raises(GameError):
            verify_utility_gap(nexp_sat.game, nexp_sat.honest, 2, 7)


class TestGapCloseness:
    def test_star_is_close_to_itself(self, nexp_sat):
        assert check_gap_closeness(nexp_sat.game, nexp_sat.honest, nexp_sat.honest, 10**9)

    def test_wrong_bit_profile_fails_in_verified_game(self, nexp_unsat_third):
        game, scale = nexp_unsat_third.game, nexp_unsat_third.scale
        alpha_scaled = F(2) / scale
        s_star = nexp_unsat_third.honest
        assert verify_utility_gap(game, s_star, alpha_scaled, 0).verdict
        liar = s_star.replace(game.set_by_history[()].key, "c=1")
        assert not check_gap_closeness(game, liar, s_star, alpha_scaled)

    def test_tie_deviation_stays_close_with_correct_bit(self):
        nodes = {
            (): DecisionNode(1, ("a", "b", "c")),
            ("a",): TerminalNode((F(1, 2),), 1),
            ("b",): TerminalNode((F(1, 2),), 1),
            ("c",): TerminalNode((F(0),), 0),
        }
        game = make_game(1, nodes)
        sses = enumerate_sse(game)
        s_star = dominant_sse_set(game, sses)[0]
        tied = next(s for s in sses if s != s_star)
        assert check_gap_closeness(game, tied, s_star, 10**6)
        assert answer_bit_distribution(game, tied)[1] == 1

    def test_witness_closeness_coupling(self):
        # No witness for a deviating profile forces closeness, except exactly
        # at the threshold or when only non-deviating provers would gain.
        rng = random.Random(900)
        from randgames import random_profile

        checked = 0
        for _ in range(50):
            game = random_game(rng, max_nodes=40, max_prover_sets=5, max_actions=2)
            try:
                sses = enumerate_sse(game, cap=3000)
            except Exception:
                continue
            doms = dominant_sse_set(game, sses)
            if not doms:
                continue
            s_star = doms[0]
            alpha = 7  # arbitrary threshold
            for _ in range(4):
                s = random_profile(rng, game)
                if s == s_star:
                    continue
                checked += 1
                if find_gap_witness(game, s_star, s, alpha) is None:
                    if not check_gap_closeness(game, s, s_star, alpha):
                        # Localize the failure: it must involve a prover who
                        # did not deviate inside the subform, or an exact tie
                        # with the threshold.
                        ok = False
                        from provergames.gaps import _deviators_inside, _subform_reachable
                        from provergames.trees import expected_utility
                        from provergames.subforms import sets_in

                        for sf in find_subforms(game):
                            if not _subform_reachable(game, s, sf):
                                continue
                            spliced = splice(game, s, sf, s_star)
                            devs = _deviators_inside(game, s, s_star, sf)
                            for iset in sets_in(game, sf):
                                j = iset.owner
                                gain = expected_utility(game, spliced, j) - expected_utility(game, s, j)
                                if gain >= F(1, alpha):
                                    assert j not in devs or gain == F(1, alpha)
                                    ok = True
                        assert ok
        assert checked > 50


class TestSubintervalProfiles:
    def test_index_partition(self):
        assert subinterval_index(F(-1), 1) == -4
        assert subinterval_index(F(0), 1) == 0
        assert subinterval_index(F(1), 1) == 3
        assert subinterval_index(F(1, 4) - F(1, 100), 2) == 1

    def test_single_sse_vacuous(self):
        nodes = {
            (): DecisionNode(1, ("a", "b")),
            ("a",): TerminalNode((F(1, 2),), 1),
            ("b",): TerminalNode((F(0),), 0),
        }
        game = make_game(1, nodes)
        report = subinterval_profile_check(game, 2, enumerate_sse(game))
        assert report.ok and report.checked == 0

    def test_mini_coloring_holds(self, mini_coloring):
        game = mini_coloring.game
        report = subinterval_profile_check(game, 2, enumerate_sse(game))
        assert report.ok

    def test_mrip_toy_non_vacuous(self, mrip_toy):
        # The commit-low SSEs fail closeness and land in different subintervals.
        game, scale = mrip_toy.game, mrip_toy.scale
        sses = enumerate_sse(game)
        alpha_scaled = int(F(3) / scale)
        report = subinterval_profile_check(game, alpha_scaled, sses)
        assert report.ok
        assert report.checked >= 1
