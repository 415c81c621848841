import pytest

from cli.options import (
    CurveOptions,
    FloorOptions,
    SimulateOptions,
    VarianceOptions,
    resolve_options,
)
from shared.errors import ConfigError


class TestResolveOptions:
    """Config blocks with flag overrides"""

    def test_flags_override_block(self):
        options = resolve_options(
            FloorOptions, {"n": 1000, "s_min": 4}, {"n": 5000, "s_max": None}, "floor"
        )
        assert options.n == 5000
        assert options.s_min == 4
        assert options.s_max is None

    def test_error_points_into_block(self):
        with pytest.raises(ConfigError) as info:
            resolve_options(FloorOptions, {"n": 0}, {}, "floor")
        assert info.value.key_path == ("floor", "n")

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as info:
            resolve_options(FloorOptions, {"n": 10, "smin": 3}, {}, "floor")
        assert info.value.key_path == ("floor", "smin")

    def test_block_must_be_object(self):
        with pytest.raises(ConfigError):
            resolve_options(FloorOptions, [1, 2], {}, "floor")

    def test_missing_required(self):
        with pytest.raises(ConfigError):
            resolve_options(SimulateOptions, None, {"n": 10}, "simulate")


class TestGrid:
    def test_endpoints(self):
        grid = CurveOptions(n=10, eps_min=0.3, eps_max=0.5, points=5).grid()
        assert grid[0] == 0.3
        assert grid[-1] == pytest.approx(0.5)
        assert len(grid) == 5

    def test_variance_defaults(self):
        assert VarianceOptions().ells == list(range(10))

    def test_epsilons_checked(self):
        with pytest.raises(ValueError):
            SimulateOptions(n=10, epsilons=[0.2, 1.2], trials=5)
