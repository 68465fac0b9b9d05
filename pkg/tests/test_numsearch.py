import json
import math

import numpy as np
import pytest

from steerbound.assemblage import chsh_reference, validate
from steerbound.fidelity import assemblage_fidelity
from steerbound.matkernel import I2, PAULI_X, PAULI_Z, ValidationError
from steerbound.numsearch import (
    CHANNEL_FAMILIES,
    SearchConfig,
    best_channel,
    embed_params,
    enforce_uniform_marginals,
    fidelity_after_kraus,
    kraus_ops,
    min_extractability_at_beta,
    sample_assemblage,
    sandwich_sweep,
)
from steerbound.selftest import analytic_bound, upper_bound
from steerbound.steering import BETA_QUANTUM

SQRT2 = math.sqrt(2)


class TestConfig:
    def test_defaults_valid(self):
        SearchConfig().check()

    def test_json_round_trip(self):
        cfg = SearchConfig(samples=7, beta_targets=(2.2, 2.5), rng_seed=99)
        back = SearchConfig.from_json(cfg.to_json())
        assert back == cfg

    def test_rejects_bad_family(self):
        with pytest.raises(ValidationError):
            SearchConfig(channel_family="nonsense").check()

    def test_rejects_bad_targets(self):
        with pytest.raises(ValidationError):
            SearchConfig(beta_targets=(1.5,)).check()
        with pytest.raises(ValidationError):
            SearchConfig(beta_targets=(3.0,)).check()

    def test_rejects_nonpositive_tolerance(self):
        with pytest.raises(ValidationError):
            SearchConfig(tolerance=0.0).check()


class TestSampling:
    def test_samples_are_valid(self, rng):
        for _ in range(25):
            asm = sample_assemblage(rng)
            assert validate(asm).passed

    def test_uniform_marginal_mode(self, rng):
        for _ in range(25):
            asm = sample_assemblage(rng, uniform_marginals=True)
            assert asm.max_marginal_deviation() < 1e-10

    def test_enforce_uniform_marginals(self, rng):
        for _ in range(25):
            asm = sample_assemblage(rng)
            fixed = enforce_uniform_marginals(asm)
            assert fixed.max_marginal_deviation() < 1e-12
            assert validate(fixed).passed


class TestChannelFamilies:
    def _tp_check(self, kraus):
        total = sum(k.conj().T @ k for k in kraus)
        np.testing.assert_allclose(total, I2, atol=1e-12)

    def test_trace_preserving(self, rng):
        for family in CHANNEL_FAMILIES:
            from steerbound.numsearch import family_dim, param_bounds

            bounds = param_bounds(family)
            for theta in (0.2, 1.2):
                for _ in range(20):
                    params = [rng.uniform(lo, hi) for lo, hi in bounds]
                    self._tp_check(kraus_ops(family, theta, params))

    def test_identity_member(self):
        kraus = kraus_ops("dephasing-only", 0.4, [1.0])
        rho = np.array([[0.7, 0.2 + 0.1j], [0.2 - 0.1j, 0.3]])
        mapped = sum(k @ rho @ k.conj().T for k in kraus)
        np.testing.assert_allclose(mapped, rho, atol=1e-12)

    def test_embedding_preserves_channel(self, rng):
        rho = np.array([[0.6, 0.1 - 0.2j], [0.1 + 0.2j, 0.4]])
        pairs = [
            ("dephasing-only", "unitary-pre-post-dephasing"),
            ("dephasing-only", "general-two-kraus"),
            ("unitary-pre-post-dephasing", "general-two-kraus"),
        ]
        from steerbound.numsearch import param_bounds

        for small, large in pairs:
            for theta in (0.3, 1.1):
                for _ in range(20):
                    params = [rng.uniform(lo, hi) for lo, hi in param_bounds(small)]
                    lifted = embed_params(small, large, theta, params)
                    a = sum(
                        k @ rho @ k.conj().T for k in kraus_ops(small, theta, params)
                    )
                    b = sum(
                        k @ rho @ k.conj().T for k in kraus_ops(large, theta, lifted)
                    )
                    np.testing.assert_allclose(a, b, atol=1e-10)

    def test_unknown_family_rejected(self):
        with pytest.raises(ValidationError):
            kraus_ops("nope", 0.3, [0.5])


class TestBestChannel:
    def test_reference_identity_optimal(self):
        result, fid = best_channel(chsh_reference(), math.pi / 4)
        assert fid == pytest.approx(1.0, abs=1e-9)

    def test_conjugated_reference_recovered(self):
        # rotating every element by X is undone by a unitary channel
        ref = chsh_reference()
        rotated = {k: PAULI_X @ m @ PAULI_X for k, m in ref.elements.items()}
        from steerbound.assemblage import Assemblage

        asm = Assemblage(2, 2, rotated)
        _, fid = best_channel(asm, math.pi / 4)
        assert fid == pytest.approx(1.0, abs=1e-5)

    def test_monotone_in_family_nesting(self, rng):
        # richer families never do worse when warm-started from smaller ones
        for _ in range(3):
            asm = sample_assemblage(rng, uniform_marginals=True)
            res_small, f_small = best_channel(asm, 0.7, "dephasing-only")
            lifted = embed_params(
                "dephasing-only", "unitary-pre-post-dephasing", 0.7, res_small.params
            )
            _, f_mid = best_channel(
                asm, 0.7, "unitary-pre-post-dephasing", extra_starts=[lifted]
            )
            assert f_mid >= f_small - 1e-9

    def test_fidelity_matches_direct_evaluation(self, rng):
        asm = sample_assemblage(rng, uniform_marginals=True)
        result, fid = best_channel(asm, 0.5)
        direct = assemblage_fidelity(chsh_reference(), result.apply_elementwise(asm))
        assert fid == pytest.approx(direct, abs=1e-9)

    def test_fidelity_after_kraus_agrees(self, rng):
        asm = sample_assemblage(rng)
        kraus = kraus_ops("dephasing-only", 0.4, [0.6])
        from steerbound.numsearch import ChannelResult

        cr = ChannelResult("dephasing-only", 0.4, (0.6,), 0.0)
        direct = assemblage_fidelity(chsh_reference(), cr.apply_elementwise(asm))
        assert fidelity_after_kraus(asm, kraus) == pytest.approx(direct, abs=1e-9)


class TestSandwich:
    def test_single_target_record(self):
        cfg = SearchConfig(samples=4, beta_targets=(2.5,), tolerance=1e-4)
        record = min_extractability_at_beta(2.5, cfg)
        assert record.residual < cfg.tolerance
        assert record.analytic_lower == pytest.approx(analytic_bound(2.5), abs=1e-12)
        assert record.eq8_upper == pytest.approx(upper_bound(2.5), abs=1e-12)
        assert record.passes(cfg.tolerance)

    def test_max_violation_pins_fidelity_one(self):
        cfg = SearchConfig(samples=4, beta_targets=(BETA_QUANTUM,), tolerance=1e-6)
        record = min_extractability_at_beta(BETA_QUANTUM, cfg)
        assert record.numeric_min == pytest.approx(1.0, abs=1e-6)

    def test_beta_out_of_range(self):
        cfg = SearchConfig(samples=1)
        with pytest.raises(ValidationError):
            min_extractability_at_beta(1.9, cfg)

    def test_sweep_reproducible(self):
        cfg = SearchConfig(samples=3, beta_targets=(2.3, 2.6), seesaw_rounds=1)
        a = sandwich_sweep(cfg)
        b = sandwich_sweep(cfg)
        assert a.to_json() == b.to_json()
        assert a.passed

    def test_report_serialization(self):
        cfg = SearchConfig(samples=2, beta_targets=(2.4,), seesaw_rounds=1)
        report = sandwich_sweep(cfg)
        payload = json.loads(report.to_json())
        assert payload["passed"] == report.passed
        assert len(payload["records"]) == 1
        csv_text = report.to_csv()
        lines = csv_text.strip().split("\n")
        assert lines[0].startswith("beta,numeric_min,analytic_lower")
        assert len(lines) == 2
