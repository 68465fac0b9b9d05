import math

import numpy as np
import pytest

from steerbound.assemblage import (
    Assemblage,
    ClassicalStrategy,
    QuantumRealization,
    ValidationError,
    chsh_reference,
    from_classical,
    random_realization,
    realize,
    validate,
)
from steerbound.matkernel import (
    I2,
    I4,
    KET0,
    KET1,
    KET_MINUS,
    KET_PLUS,
    PAULI_X,
    PAULI_Z,
    projector,
)

SQRT2 = math.sqrt(2)


def phi_plus():
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / SQRT2
    return np.outer(v, v.conj())


def zx_povms():
    return {
        0: [(I2 + PAULI_Z) / 2, (I2 - PAULI_Z) / 2],
        1: [(I2 + PAULI_X) / 2, (I2 - PAULI_X) / 2],
    }


class TestReference:
    def test_elements(self):
        ref = chsh_reference()
        np.testing.assert_allclose(ref.element(0, 0), projector(KET0) / 2, atol=1e-14)
        np.testing.assert_allclose(ref.element(1, 0), projector(KET1) / 2, atol=1e-14)
        np.testing.assert_allclose(ref.element(0, 1), projector(KET_PLUS) / 2, atol=1e-14)
        np.testing.assert_allclose(ref.element(1, 1), projector(KET_MINUS) / 2, atol=1e-14)

    def test_uniform_probabilities(self):
        ref = chsh_reference()
        for x in range(2):
            for a in range(2):
                assert ref.prob(a, x) == pytest.approx(0.5, abs=1e-14)
        assert ref.max_marginal_deviation() < 1e-14

    def test_valid(self):
        assert validate(chsh_reference()).passed

    def test_realized_by_zx_on_maximally_entangled(self):
        asm = realize(QuantumRealization(phi_plus(), zx_povms()))
        ref = chsh_reference()
        for key in ref.elements:
            np.testing.assert_allclose(asm.elements[key], ref.elements[key], atol=1e-12)


class TestRealize:
    def test_no_signaling_always(self, rng):
        for _ in range(25):
            asm = realize(random_realization(rng))
            report = validate(asm)
            assert report.passed, report.failures()

    def test_nonprojective_povms(self, rng):
        for _ in range(25):
            asm = realize(random_realization(rng, projective=False))
            assert validate(asm).passed

    def test_uniform_marginal_sampling(self, rng):
        for _ in range(25):
            asm = realize(random_realization(rng, uniform_marginals=True))
            assert asm.max_marginal_deviation() < 1e-10

    def test_rejects_unnormalized_state(self):
        with pytest.raises(ValidationError):
            realize(QuantumRealization(2 * phi_plus(), zx_povms()))

    def test_rejects_bad_povm(self):
        povms = zx_povms()
        povms[0] = [I2, I2]  # does not sum to identity
        with pytest.raises(ValidationError):
            realize(QuantumRealization(phi_plus(), povms))

    def test_rejects_non_psd_state(self):
        state = phi_plus() - 0.2 * I4 / 4
        state = state / np.trace(state).real
        with pytest.raises(ValidationError):
            realize(QuantumRealization(state, zx_povms()))


class TestClassical:
    def test_single_state_strategy(self):
        rho = projector(KET0)
        s = ClassicalStrategy(
            weights={0: 1.0},
            response={(0, 0): 0, (0, 1): 1},
            hidden_states={0: rho},
        )
        asm = from_classical(s)
        np.testing.assert_allclose(asm.element(0, 0), rho, atol=1e-14)
        np.testing.assert_allclose(asm.element(1, 1), rho, atol=1e-14)
        assert asm.prob(1, 0) == pytest.approx(0.0, abs=1e-14)
        assert validate(asm).passed

    def test_weights_must_sum_to_one(self):
        s = ClassicalStrategy(
            weights={0: 0.7},
            response={(0, 0): 0, (0, 1): 0},
            hidden_states={0: projector(KET0)},
        )
        with pytest.raises(ValidationError):
            from_classical(s)

    def test_response_out_of_range(self):
        s = ClassicalStrategy(
            weights={0: 1.0},
            response={(0, 0): 3, (0, 1): 0},
            hidden_states={0: projector(KET0)},
        )
        with pytest.raises(ValidationError):
            from_classical(s)

    def test_random_mixtures_are_valid(self, rng):
        for _ in range(25):
            n_lam = int(rng.integers(1, 5))
            w = rng.dirichlet(np.ones(n_lam))
            weights = {lam: float(w[lam]) for lam in range(n_lam)}
            response = {
                (lam, x): int(rng.integers(0, 2))
                for lam in range(n_lam)
                for x in range(2)
            }
            hidden = {}
            for lam in range(n_lam):
                g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                m = g @ g.conj().T
                hidden[lam] = m / np.trace(m).real
            asm = from_classical(ClassicalStrategy(weights, response, hidden))
            assert validate(asm).passed


class TestValidate:
    def test_flags_signaling(self):
        ref = chsh_reference()
        bad = dict(ref.elements)
        bad[(0, 1)] = projector(KET0) * 0.8
        bad[(1, 1)] = projector(KET1) * 0.2
        report = validate(Assemblage(2, 2, bad))
        assert not report.passed
        assert any("no-signaling" in f for f in report.failures())

    def test_flags_negative_eigenvalue(self):
        ref = chsh_reference()
        bad = dict(ref.elements)
        bad[(0, 0)] = ref.elements[(0, 0)] - 0.1 * projector(KET1)
        bad[(1, 0)] = ref.elements[(1, 0)] + 0.1 * projector(KET1)
        report = validate(Assemblage(2, 2, bad))
        assert report.psd_margin < -1e-3
        assert any("positivity" in f for f in report.failures())

    def test_flags_normalization(self):
        scaled = {k: 1.3 * v for k, v in chsh_reference().elements.items()}
        report = validate(Assemblage(2, 2, scaled))
        assert report.normalization_deviation == pytest.approx(0.3, abs=1e-12)
        assert not report.passed


class TestAssemblageOps:
    def test_mix_interpolates_probabilities(self):
        ref = chsh_reference()
        flipped = ref.flip_outcomes()
        mixed = ref.mix(flipped, 0.25)
        np.testing.assert_allclose(
            mixed.element(0, 0),
            0.25 * ref.element(0, 0) + 0.75 * ref.element(1, 0),
            atol=1e-14,
        )

    def test_flip_is_involution(self):
        ref = chsh_reference()
        twice = ref.flip_outcomes().flip_outcomes()
        for key in ref.elements:
            np.testing.assert_allclose(twice.elements[key], ref.elements[key])

    def test_conditional_state_of_zero_prob_element(self):
        asm = from_classical(
            ClassicalStrategy(
                weights={0: 1.0},
                response={(0, 0): 0, (0, 1): 0},
                hidden_states={0: projector(KET0)},
            )
        )
        with pytest.raises(ValidationError):
            asm.conditional_state(1, 0)

    def test_json_round_trip(self, rng):
        asm = realize(random_realization(rng))
        back = Assemblage.from_json(asm.to_json())
        assert (back.outcomes, back.settings) == (2, 2)
        for key in asm.elements:
            np.testing.assert_allclose(back.elements[key], asm.elements[key], atol=1e-15)
