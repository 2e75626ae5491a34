"""Stratifications induced by blowup towers, checked against hand expansions."""

import pytest

from singpair.blowup import ResolutionTower
from singpair.ideals import Ideal
from singpair.polyring import PolynomialRing
from singpair.strata import PRESETS, Stratification, split_components

CONE = PolynomialRing(("x", "y", "z", "t"))


def cone_tower():
    tower = ResolutionTower.affine(CONE, (CONE.parse("x^2 - y^2 + t*z^2"),))
    tower.blow_up((CONE.var("x"), CONE.var("y"), CONE.var("z")))
    return tower


def same_variety(a: Ideal, b: Ideal) -> bool:
    return a.variety_contained_in(b) and b.variety_contained_in(a)


class TestSplitComponents:
    def test_splits_a_product(self):
        ring = PolynomialRing(("x", "y"))
        parts = split_components(Ideal(ring, (ring.parse("x*y"),)))
        assert len(parts) == 2
        assert {str(p.gens[0]) for p in parts} == {"x", "y"}

    def test_drops_multiplicity(self):
        ring = PolynomialRing(("x", "y"))
        parts = split_components(Ideal(ring, (ring.parse("x^2*y"),)))
        assert len(parts) == 2

    def test_absorbs_contained_branches(self):
        ring = PolynomialRing(("x", "y"))
        parts = split_components(Ideal.parse(ring, "x*y; x"))
        assert len(parts) == 1
        assert same_variety(parts[0], Ideal(ring, (ring.var("x"),)))


class TestConeStratification:
    def test_coarse(self):
        strat = Stratification(cone_tower(), rules=("images",))
        assert strat.top == 3
        line = Ideal.parse(CONE, "x; y; z")
        for i in (1, 2):
            assert len(strat.level(i)) == 1
            assert same_variety(strat.level(i)[0], line)
        assert strat.level(3) == []

    def test_refined_adds_rank_drop_point(self):
        strat = Stratification(cone_tower(), rules=("images", "fibers"))
        assert len(strat.level(3)) == 1
        assert same_variety(strat.level(3)[0], Ideal.parse(CONE, "x; y; z; t"))
        # shallower levels still show only the line: the point is absorbed
        line = Ideal.parse(CONE, "x; y; z")
        assert len(strat.level(2)) == 1
        assert same_variety(strat.level(2)[0], line)

    def test_provenance_and_levels_out_of_range(self):
        strat = Stratification(cone_tower(), rules=("images", "fibers"))
        rules_used = {p.rule for p in strat.pieces}
        assert "seed" in rules_used and "fibers" in rules_used
        assert strat.level(0)[0] is not None
        assert strat.level(9) == []

    def test_unknown_rule_and_preset(self):
        with pytest.raises(ValueError):
            Stratification(cone_tower(), rules=("nope",))
        with pytest.raises(ValueError):
            Stratification(cone_tower(), preset="nope")
        assert set(PRESETS) == {"curve_recipe", "fourfold_recipe"}


class TestSmoothPlane:
    def test_origin_enters_at_bottom(self):
        ring = PolynomialRing(("x", "y"))
        tower = ResolutionTower.affine(ring, ())
        tower.blow_up((ring.var("x"), ring.var("y")))
        strat = Stratification(tower, rules=("images",))
        assert strat.top == 2
        origin = Ideal.parse(ring, "x; y")
        for i in (1, 2):
            assert len(strat.level(i)) == 1
            assert same_variety(strat.level(i)[0], origin)


class TestFourfold:
    def test_rank_drop_curve_at_level_three(self):
        ring = PolynomialRing(("x", "y", "z", "t", "w"))
        tower = ResolutionTower.affine(ring, (ring.parse("x^2 - y^2 + t*z^2"),))
        tower.blow_up((ring.var("x"), ring.var("y"), ring.var("z")))
        strat = Stratification(tower, preset="fourfold_recipe")
        assert strat.top == 4
        assert same_variety(strat.level(2)[0], Ideal.parse(ring, "x; y; z"))
        assert len(strat.level(3)) == 1
        assert same_variety(strat.level(3)[0], Ideal.parse(ring, "x; y; z; t"))
        assert strat.level(4) == []


class TestNodalImages:
    def test_node_is_one_level_deeper_than_curve(self):
        ring = PolynomialRing(("x", "y", "w"))
        tower = ResolutionTower.affine(ring, ())
        tower.blow_up((ring.var("x"), ring.var("y"), ring.var("w")))
        curve = (ring.parse("y^2 - x^3 - x^2"), ring.var("w"))
        tower.blow_up(curve)
        strat = Stratification(tower, preset="curve_recipe")
        assert strat.top == 3
        w_ideal = Ideal(ring, curve)
        origin = Ideal.parse(ring, "x; y; w")
        assert len(strat.level(2)) == 1
        assert same_variety(strat.level(2)[0], w_ideal)
        assert len(strat.level(3)) == 1
        assert same_variety(strat.level(3)[0], origin)
        assert same_variety(strat.level(1)[0], w_ideal)


class TestProjectiveStratification:
    def test_three_lines_and_two_points(self):
        ring = PolynomialRing(("S", "T", "X", "Y", "Z"))
        f = ring.parse("S*X^2 - S*Y^2 + T*Z^2")
        tower = ResolutionTower.projective(ring, (f,))
        tower.blow_up((ring.var("X"), ring.var("Y"), ring.var("Z")))
        tower.blow_up((ring.parse("X + Y"), ring.var("S"), ring.var("Z")))
        tower.blow_up((ring.parse("X - Y"), ring.var("S"), ring.var("Z")))
        strat = Stratification(
            tower, rules=("fibers", "singular_images", "components")
        )
        assert strat.top == 3
        lines = [
            Ideal.parse(ring, "X; Y; Z"),
            Ideal.parse(ring, "X + Y; S; Z"),
            Ideal.parse(ring, "X - Y; S; Z"),
        ]
        level2 = strat.level(2)
        assert len(level2) == 3
        for expected in lines:
            assert any(same_variety(got, expected) for got in level2)
        points = [
            Ideal.parse(ring, "S; X; Y; Z"),
            Ideal.parse(ring, "T; X; Y; Z"),
        ]
        level3 = strat.level(3)
        assert len(level3) == 2
        for expected in points:
            assert any(same_variety(got, expected) for got in level3)


class TestUserPieces:
    def test_off_variety_piece_warns_but_lands(self):
        tower = cone_tower()
        piece = Ideal.parse(CONE, "x - 1; y; z; t")  # not on the cone
        strat = Stratification(tower, rules=("images",), user_pieces=(piece,))
        assert any("does not lie on the variety" in w for w in strat.warnings)
        assert any(same_variety(p, piece) for p in strat.level(3))

    def test_on_variety_piece_no_warning(self):
        tower = cone_tower()
        piece = Ideal.parse(CONE, "x - 1; y - 1; z; t")  # on the cone
        strat = Stratification(tower, rules=("images",), user_pieces=(piece,))
        assert not any("does not lie" in w for w in strat.warnings)
        assert any(same_variety(p, piece) for p in strat.level(3))
