"""Fresnel coefficients, characteristic matrices, stack files."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qellip import (
    InvalidParameterError,
    Layer,
    LayerStack,
    NumericalDomainError,
    StackParseError,
    analyze,
    coherent_state,
    fresnel_interface,
    parse_stack_text,
    rho_with_noise,
    stack_reflection,
)

from oracles import airy_reflection, random_stack

SIO2_ON_SI = LayerStack(1.0, (Layer(1.46 + 0.0j, 100.0),), 3.85 + 0.02j,
                        632.8, np.deg2rad(70.0))


class TestFresnel:
    def test_brewster_null(self):
        r_p, r_s = fresnel_interface(1.0, 1.5, np.arctan(1.5))
        assert abs(r_p) < 1e-14
        assert abs(r_s) > 0.1

    def test_normal_incidence_signs(self):
        r_p, r_s = fresnel_interface(1.0, 1.5, 0.0)
        assert r_s == pytest.approx(-0.2)
        assert r_p == pytest.approx(+0.2)
        assert r_p / r_s == pytest.approx(-1.0)

    def test_matched_media(self):
        r_p, r_s = fresnel_interface(1.5, 1.5, 0.7)
        assert r_p == 0.0
        assert r_s == 0.0

    def test_zero_incident_index_rejected(self):
        with pytest.raises(InvalidParameterError):
            fresnel_interface(0.0, 1.5, 0.3)

    @given(st.floats(1.01, 4.0), st.floats(0.0, 1.5))
    @settings(max_examples=60, deadline=None)
    def test_lossless_energy_bound(self, n, theta):
        r_p, r_s = fresnel_interface(1.0, n, theta)
        assert abs(r_p) <= 1.0 + 1e-12
        assert abs(r_s) <= 1.0 + 1e-12


class TestStackReflection:
    def test_no_layers_equals_fresnel(self):
        stack = LayerStack(1.0, (), 3.85 + 0.02j, 632.8, 1.1)
        res = stack_reflection(stack)
        r_p, r_s = fresnel_interface(1.0, 3.85 + 0.02j, 1.1)
        assert res.r_p == pytest.approx(r_p, abs=1e-14)
        assert res.r_s == pytest.approx(r_s, abs=1e-14)

    def test_zero_thickness_layer_is_identity(self):
        with_film = LayerStack(1.0, (Layer(2.1 + 0.3j, 0.0),), 1.5, 632.8, 0.4)
        bare = LayerStack(1.0, (), 1.5, 632.8, 0.4)
        a, b = stack_reflection(with_film), stack_reflection(bare)
        assert a.r_p == b.r_p
        assert a.r_s == b.r_s

    def test_half_wave_film_is_absentee(self):
        n, lam = 1.46, 632.8
        film = LayerStack(1.0, (Layer(n + 0j, lam / (2.0 * n)),),
                          3.85 + 0.02j, lam, 0.0)
        bare = LayerStack(1.0, (), 3.85 + 0.02j, lam, 0.0)
        assert abs(stack_reflection(film).rho
                   - stack_reflection(bare).rho) < 1e-10

    def test_film_example_against_airy_oracle(self):
        res = stack_reflection(SIO2_ON_SI)
        assert abs(res.r_p - airy_reflection(SIO2_ON_SI, "p")) < 1e-10
        assert abs(res.r_s - airy_reflection(SIO2_ON_SI, "s")) < 1e-10

    def test_randomized_stacks_against_airy_oracle(self):
        rng = np.random.default_rng(1234)
        for _ in range(100):
            stack = random_stack(rng)
            res = stack_reflection(stack)
            assert abs(res.r_p - airy_reflection(stack, "p")) < 1e-10
            assert abs(res.r_s - airy_reflection(stack, "s")) < 1e-10

    def test_lossless_energy_bound(self):
        rng = np.random.default_rng(99)
        for _ in range(60):
            res = stack_reflection(random_stack(rng, lossless=True))
            assert abs(res.r_p) <= 1.0 + 1e-12
            assert abs(res.r_s) <= 1.0 + 1e-12

    def test_continuity_as_thickness_vanishes(self):
        bare = stack_reflection(LayerStack(1.0, (), 2.5 + 0.1j, 600.0, 0.9))
        thin = stack_reflection(LayerStack(1.0, (Layer(1.8 + 0j, 1e-10),),
                                           2.5 + 0.1j, 600.0, 0.9))
        assert abs(thin.r_p - bare.r_p) < 1e-12
        assert abs(thin.r_s - bare.r_s) < 1e-12

    def test_rho_is_scale_invariant(self):
        res = stack_reflection(SIO2_ON_SI)
        scale = 0.3 - 0.8j
        assert (scale * res.r_p) / (scale * res.r_s) == pytest.approx(res.rho,
                                                                      abs=1e-14)

    def test_result_field_consistency(self):
        res = stack_reflection(SIO2_ON_SI)
        assert res.rho == pytest.approx(res.r_p / res.r_s, abs=1e-15)
        assert np.tan(res.psi_angle) == pytest.approx(abs(res.rho), abs=1e-12)
        assert 0.0 <= res.psi_angle <= np.pi / 2.0
        assert 0.0 <= res.delta < 2.0 * np.pi

    def test_grazing_layer_mode_rejected(self):
        # a layer index matching the transverse wavevector kills cos(theta)
        theta = 1.0
        stack = LayerStack(1.0, (Layer(complex(np.sin(theta)), 50.0),),
                           1.5, 632.8, theta)
        with pytest.raises(NumericalDomainError):
            stack_reflection(stack)


class TestStackValidation:
    def test_negative_thickness(self):
        with pytest.raises(InvalidParameterError):
            LayerStack(1.0, (Layer(1.5 + 0j, -1.0),), 1.5, 632.8, 0.3)

    def test_gain_index_rejected(self):
        with pytest.raises(InvalidParameterError):
            LayerStack(1.0, (), 1.5 - 0.1j, 632.8, 0.3)

    def test_bad_wavelength_and_angle(self):
        with pytest.raises(InvalidParameterError):
            LayerStack(1.0, (), 1.5, 0.0, 0.3)
        with pytest.raises(InvalidParameterError):
            LayerStack(1.0, (), 1.5, 632.8, np.pi / 2.0)


class TestNoiseAnnotation:
    def test_coherent_bars_on_bare_glass(self):
        stack = LayerStack(1.0, (), 1.5, 632.8, np.deg2rad(70.0))
        a = np.sqrt(50.0)
        result, bars = rho_with_noise(stack, analyze(coherent_state(a, a)))
        assert bars.sigma_delta == pytest.approx(0.1, rel=0.1)
        assert result.r_s == pytest.approx(fresnel_interface(1.0, 1.5,
                                                             np.deg2rad(70.0))[1])

    def test_phase_profile_shrinks_modulus_bar_at_equal_photons(self):
        from qellip import embed_phase_state, from_mathieu, solve_even_mathieu
        from qellip.phase_space import circular_moments
        stack = LayerStack(1.0, (), 1.5, 632.8, np.deg2rad(70.0))
        nbar = 100
        a = np.sqrt(nbar / 2.0)
        _, coh = rho_with_noise(stack, analyze(coherent_state(a, a)))
        psi = from_mathieu(solve_even_mathieu(1.0, 0))
        _, mat = rho_with_noise(stack, analyze(embed_phase_state(psi, nbar)))
        # modulus channel improves by sqrt(Var L / (nbar/4)) at equal nbar
        expected = np.sqrt(circular_moments(psi).l_var / (nbar / 4.0))
        ratio = mat.sigma_tanpsi_rel / coh.sigma_tanpsi_rel
        assert ratio == pytest.approx(expected, rel=0.05)
        assert ratio < 0.1


class TestStackFiles:
    GOOD = """\
# SiO2-like film on an absorbing substrate
ambient 1.0
wavelength 632.8
layer 1.46 0.0 100.0
substrate 3.85 0.02
angle 70
"""

    def test_parse_and_reflect(self):
        stack = parse_stack_text(self.GOOD)
        assert stack.layers == (Layer(1.46 + 0.0j, 100.0),)
        assert stack.angle_of_incidence == pytest.approx(np.deg2rad(70.0))
        res = stack_reflection(stack)
        ref = stack_reflection(SIO2_ON_SI)
        assert res.rho == ref.rho

    def test_layer_order_is_significant(self):
        two = parse_stack_text(
            "ambient 1.0\nlayer 1.46 0 80\nlayer 2.3 0.1 40\n"
            "substrate 3.85 0.02\nwavelength 632.8\nangle 65\n")
        swapped = parse_stack_text(
            "ambient 1.0\nlayer 2.3 0.1 40\nlayer 1.46 0 80\n"
            "substrate 3.85 0.02\nwavelength 632.8\nangle 65\n")
        assert stack_reflection(two).rho != stack_reflection(swapped).rho

    def test_other_keys_order_insensitive(self):
        reordered = parse_stack_text(
            "angle 70\nsubstrate 3.85 0.02\nlayer 1.46 0.0 100.0\n"
            "wavelength 632.8\nambient 1.0\n")
        assert stack_reflection(reordered).rho == stack_reflection(
            parse_stack_text(self.GOOD)).rho

    @pytest.mark.parametrize("text", [
        "ambient 1.0\nsubstrate 1.5 0\nwavelength 600\n",       # missing angle
        "ambient 1.0\nambient 1.0\nsubstrate 1.5 0\nwavelength 600\nangle 50\n",
        "ambient 1.0\nsubstrate 1.5 0\nwavelength 600\nangle fifty\n",
        "ambient 1.0\nlayer 1.46 100.0\nsubstrate 1.5 0\nwavelength 600\nangle 50\n",
        "ambient 1.0\nmystery 3\nsubstrate 1.5 0\nwavelength 600\nangle 50\n",
        "ambient 1.0\nsubstrate 1.5 -0.2\nwavelength 600\nangle 50\n",
    ])
    def test_parse_errors(self, text):
        with pytest.raises(StackParseError):
            parse_stack_text(text)
