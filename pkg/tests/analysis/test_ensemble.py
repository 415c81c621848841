import numpy as np
import pytest

from analysis.ensemble import (
    design_rate,
    edge_to_node,
    node_to_edge,
    perturb,
    rate_differential,
    random_pair,
    validate,
)
from models.ensemble import DegreePair, DegreePolynomial
from shared.errors import EnsembleError


class TestDegreePolynomial:
    """Construction and validation of edge-perspective distributions"""

    def test_degree_map_input(self):
        """String and integer degree keys both build the dense form"""
        p = DegreePolynomial.model_validate({"2": 0.25, 3: "0.75"})
        assert p.coeffs == (0.0, 0.0, 0.25, 0.75)
        assert p.max_degree == 3
        assert p.items() == [(2, 0.25), (3, 0.75)]

    def test_trailing_zeros_trimmed(self):
        """Zero coefficients above the top degree are dropped"""
        p = DegreePolynomial(coeffs=(0.0, 0.0, 1.0, 0.0, 0.0))
        assert p.max_degree == 2

    def test_degree_zero_rejected(self):
        """Degree 0 carries no edges"""
        with pytest.raises(ValueError):
            DegreePolynomial(coeffs=(0.1, 0.0, 0.9))

    def test_diagnostics(self):
        """Negative entries and a bad sum are both reported"""
        p = DegreePolynomial(coeffs=(0.0, 0.0, 1.2, -0.1))
        problems = validate(p)
        assert len(problems) == 2
        assert any("negative" in msg for msg in problems)

    def test_valid_has_no_diagnostics(self, regular_pair):
        """A normalized non-negative distribution is valid"""
        assert validate(regular_pair.lam) == []
        assert validate(regular_pair.rho) == []

    def test_pair_rejects_invalid_component(self):
        """DegreePair refuses a component that does not sum to 1"""
        with pytest.raises(ValueError):
            DegreePair.from_maps({3: 0.9}, {6: 1.0})

    def test_node_generating(self, regular_pair):
        """For λ(x) = x² the node polynomial is L(y) = y³"""
        assert regular_pair.lam.node_generating(0.5) == pytest.approx(0.125)


class TestPerspectives:
    """Edge and node perspective conversions"""

    def test_variance_example_edge_coefficients(self, variance_pair):
        """Λ = 2/5 x² + 3/5 x³ gives λ = 4/13 x + 9/13 x²"""
        assert variance_pair.lam.coefficient(2) == pytest.approx(4 / 13)
        assert variance_pair.lam.coefficient(3) == pytest.approx(9 / 13)

    def test_round_trip(self, variance_pair):
        """edge -> node -> edge is the identity"""
        node = edge_to_node(variance_pair)
        assert node.var_fractions[2] == pytest.approx(0.4)
        assert node.var_fractions[3] == pytest.approx(0.6)
        assert node.check_fractions[2] == pytest.approx(0.3)
        back = node_to_edge(node)
        assert back.lam.coeffs == pytest.approx(variance_pair.lam.coeffs)
        assert back.rho.coeffs == pytest.approx(variance_pair.rho.coeffs)

    def test_average_degrees(self, regular_pair):
        """(3,6)-regular has average node degrees 3 and 6"""
        node = edge_to_node(regular_pair)
        assert node.avg_var_degree == pytest.approx(3.0)
        assert node.avg_check_degree == pytest.approx(6.0)


class TestRate:
    """Design rate and its first-order change"""

    def test_regular_rate(self, regular_pair):
        """(3,6)-regular has rate 1/2"""
        assert design_rate(regular_pair) == pytest.approx(0.5)

    def test_rate_differential_matches_difference(self, final_pair):
        """The linear rate change agrees with a small finite perturbation"""
        dlambda = {2: 1e-6, 3: -1e-6}
        drho = {5: -1e-6, 6: 1e-6}
        predicted = rate_differential(final_pair, dlambda, drho)
        actual = design_rate(perturb(final_pair, dlambda, drho)) - design_rate(
            final_pair
        )
        assert predicted == pytest.approx(actual, rel=1e-4)


class TestPerturb:
    """Zero-sum coefficient changes"""

    def test_perturb_applies_changes(self, regular_pair):
        """Mass moves between degrees and the result stays normalized"""
        pair = perturb(regular_pair, {3: -0.1, 4: 0.1}, {})
        assert pair.lam.coefficient(3) == pytest.approx(0.9)
        assert pair.lam.coefficient(4) == pytest.approx(0.1)
        assert pair.lam.total() == pytest.approx(1.0)

    def test_nonzero_sum_rejected(self, regular_pair):
        """A perturbation that changes the total is an error"""
        with pytest.raises(EnsembleError):
            perturb(regular_pair, {3: 0.1}, {})

    def test_negative_coefficient_rejected(self, regular_pair):
        """A coefficient cannot go below zero"""
        with pytest.raises(EnsembleError):
            perturb(regular_pair, {2: -0.1, 3: 0.1}, {})

    def test_degree_one_perturbation_rejected(self, regular_pair):
        """Degree < 1 is not a valid coordinate"""
        with pytest.raises(EnsembleError):
            perturb(regular_pair, {0: 0.1, 3: -0.1}, {})


class TestRandomPair:
    def test_random_pair_is_valid(self):
        """Random starts are valid distributions on degrees 2..max"""
        pair = random_pair(13, 10, np.random.default_rng(3))
        assert pair.lam.max_degree == 13
        assert pair.rho.max_degree == 10
        assert pair.lam.coefficient(1) == 0.0
        assert validate(pair.lam) == []
