import math
import pytest
from pysgdct.collection import Registry
from pysgdct.utils import field_path, parse_values, pattern_match, relative_error, wrap_angle


class TestPatternMatch:

    def test_wildcards(self):
        assert pattern_match("fig2a", "fig2*")
        assert pattern_match("fig2a", "fig?a")
        assert not pattern_match("fig1a", "fig?")
        assert pattern_match("fig1a", "fig?", strict = False)
        assert not pattern_match("fig1a", "fig2*")


class TestParseValues:

    def test_list(self):
        assert parse_values("5, 10,20") == [5, 10, 20]

    @pytest.mark.parametrize("value", ["", " , ", "3,0", "a,b", "-2"])
    def test_invalid(self, value):
        with pytest.raises(ValueError):
            parse_values(value)


class TestHelpers:

    def test_field_path(self):
        assert field_path(("truth", 0, "theta")) == "truth.0.theta"
        assert field_path(()) == ""

    def test_wrap_angle_boundaries(self):
        assert wrap_angle(math.pi) == -math.pi
        assert wrap_angle(-math.pi) == -math.pi
        assert wrap_angle(0.5) == pytest.approx(0.5)

    def test_relative_error(self):
        assert relative_error([0.0], [0.0]) == 0.0
        assert relative_error([1.0], [0.0]) == math.inf
        assert relative_error([1.1, 2.0], [1.0, 2.0]) == pytest.approx(0.05)


class TestRegistry:

    def test_case_insensitive(self):
        registry = Registry()
        registry["FIG1A"] = 1
        registry["fig1b"] = 2
        registry["fig2a"] = 3
        assert "Fig1a" in registry and registry["fig1A"] == 1
        assert registry.match_all("fig1*") == [1, 2]
        assert registry.match_all("fig3*") == []
        assert registry.names() == ["fig1a", "fig1b", "fig2a"]
