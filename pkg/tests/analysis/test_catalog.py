import pytest

from analysis import catalog
from analysis.ensemble import design_rate, validate


class TestCatalog:
    """Named ensembles"""

    @pytest.mark.parametrize(
        "name, rate, tol",
        [
            ("regular-3-6", 0.5, 1e-12),
            ("optim-initial", 0.2029, 1e-4),
            ("optim-intermediate", 0.218, 1e-3),
            ("optim-final", 0.41065, 1e-5),
            ("optim-expurgated", 0.433942, 1e-5),
        ],
    )
    def test_design_rates(self, name, rate, tol):
        """Published rates of the named ensembles"""
        assert design_rate(catalog.preset(name)) == pytest.approx(rate, abs=tol)

    def test_all_presets_valid(self):
        """Every preset is a normalized distribution pair"""
        for name in catalog.CATALOG:
            pair = catalog.preset(name)
            assert validate(pair.lam) == []
            assert validate(pair.rho) == []

    def test_unknown_preset(self):
        """Unknown names list the known ones"""
        with pytest.raises(KeyError) as excinfo:
            catalog.preset("no-such-code")
        assert "regular-3-6" in str(excinfo.value)

    def test_renormalized_coefficients(self):
        """Six-digit published coefficients are rescaled to sum to one"""
        pair = catalog.optim_final()
        assert pair.lam.total() == pytest.approx(1.0, abs=1e-15)
        assert pair.lam.coefficient(3) == pytest.approx(0.657891, rel=1e-5)
