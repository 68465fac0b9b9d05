"""Assemblage data model.

An assemblage is the indexed family {sigma_{a|x}} of subnormalized states of
Bob's qubit conditioned on Alice's setting x and outcome a. This module
builds assemblages from quantum realizations (shared state + Alice POVMs)
and from classical hidden-state strategies, provides the canonical CHSH-type
reference, and validates the defining constraints (positivity, no-signaling,
normalization).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .matkernel import (
    I2,
    I4,
    KET0,
    KET1,
    KET_MINUS,
    KET_PLUS,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    ValidationError,
    is_psd,
    kron,
    min_eigval,
    partial_trace_A,
    projector,
    symmetrize,
)

PROB_FLOOR = 1e-12  # below this, p(a|x) is treated as exactly 0


@dataclass(frozen=True)
class Assemblage:
    """Family of subnormalized 2x2 states sigma_{a|x}.

    ``elements[(a, x)]`` is the subnormalized state; probabilities and
    normalized conditional states are derived accessors.
    """

    outcomes: int
    settings: int
    elements: dict = field(repr=False)

    def element(self, a: int, x: int) -> np.ndarray:
        return self.elements[(a, x)]

    def prob(self, a: int, x: int) -> float:
        return float(np.trace(self.elements[(a, x)]).real)

    def conditional_state(self, a: int, x: int) -> np.ndarray:
        p = self.prob(a, x)
        if p < PROB_FLOOR:
            raise ValidationError(f"conditional state undefined: p({a}|{x}) = 0")
        return self.elements[(a, x)] / p

    def bob_marginal(self, x: int = 0) -> np.ndarray:
        return sum(self.elements[(a, x)] for a in range(self.outcomes))

    def max_marginal_deviation(self) -> float:
        """max_{a,x} |p(a|x) - 1/|A||; zero for uniform-marginal assemblages."""
        return max(
            abs(self.prob(a, x) - 1.0 / self.outcomes)
            for a in range(self.outcomes)
            for x in range(self.settings)
        )

    def mix(self, other: "Assemblage", weight: float) -> "Assemblage":
        """Convex mixture weight*self + (1-weight)*other."""
        if (self.outcomes, self.settings) != (other.outcomes, other.settings):
            raise ValidationError("cannot mix assemblages of different shape")
        mixed = {
            k: weight * v + (1 - weight) * other.elements[k]
            for k, v in self.elements.items()
        }
        return Assemblage(self.outcomes, self.settings, mixed)

    def flip_outcomes(self) -> "Assemblage":
        """Relabel a -> |A|-1-a for every setting."""
        flipped = {
            (self.outcomes - 1 - a, x): m for (a, x), m in self.elements.items()
        }
        return Assemblage(self.outcomes, self.settings, flipped)

    def to_json(self) -> str:
        payload = {
            "outcomes": self.outcomes,
            "settings": self.settings,
            "elements": [
                {
                    "a": a,
                    "x": x,
                    "re": self.elements[(a, x)].real.tolist(),
                    "im": self.elements[(a, x)].imag.tolist(),
                }
                for a in range(self.outcomes)
                for x in range(self.settings)
            ],
        }
        return json.dumps(payload, indent=2)

    @staticmethod
    def from_json(text: str) -> "Assemblage":
        payload = json.loads(text)
        elements = {
            (e["a"], e["x"]): np.array(e["re"]) + 1j * np.array(e["im"])
            for e in payload["elements"]
        }
        return Assemblage(payload["outcomes"], payload["settings"], elements)


@dataclass(frozen=True)
class QuantumRealization:
    """Shared two-qubit state plus Alice's POVMs {M_{a|x}}."""

    state: np.ndarray
    alice_povms: dict  # x -> list over a of 2x2 POVM elements

    def check(self, tol: float = 1e-10) -> None:
        if self.state.shape != (4, 4):
            raise ValidationError("shared state must be 4x4")
        if abs(np.trace(self.state).real - 1) > tol:
            raise ValidationError("shared state must have unit trace")
        if min_eigval(symmetrize(self.state)) < -tol:
            raise ValidationError("shared state must be PSD")
        for x, povm in self.alice_povms.items():
            total = sum(povm)
            if np.max(np.abs(total - I2)) > tol:
                raise ValidationError(f"POVM for setting {x} does not sum to identity")
            for a, m in enumerate(povm):
                if min_eigval(symmetrize(m)) < -tol:
                    raise ValidationError(f"POVM element ({a}|{x}) is not PSD")


@dataclass(frozen=True)
class ClassicalStrategy:
    """Hidden-variable strategy: weights p(lambda), deterministic responses
    a = response[(lambda, x)], and hidden states rho_lambda."""

    weights: dict  # lambda -> probability
    response: dict  # (lambda, x) -> outcome a
    hidden_states: dict  # lambda -> 2x2 density matrix

    def check(self, tol: float = 1e-10) -> None:
        ws = list(self.weights.values())
        if any(w < -PROB_FLOOR for w in ws):
            raise ValidationError("strategy weights must be nonnegative")
        if abs(sum(ws) - 1) > 1e-12:
            raise ValidationError("strategy weights must sum to 1")
        for lam, rho in self.hidden_states.items():
            if abs(np.trace(rho).real - 1) > tol:
                raise ValidationError(f"hidden state {lam} must have unit trace")
            if min_eigval(symmetrize(rho)) < -tol:
                raise ValidationError(f"hidden state {lam} must be PSD")


@dataclass(frozen=True)
class ValidationReport:
    psd_margin: float  # most negative eigenvalue across elements (>= 0 is clean)
    no_signaling_deviation: float
    normalization_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.psd_margin >= -self.tol
            and self.no_signaling_deviation <= self.tol
            and self.normalization_deviation <= self.tol
        )

    def failures(self) -> list:
        out = []
        if self.psd_margin < -self.tol:
            out.append(f"positivity violated: min eigenvalue {self.psd_margin:.3e}")
        if self.no_signaling_deviation > self.tol:
            out.append(
                f"no-signaling violated: deviation {self.no_signaling_deviation:.3e}"
            )
        if self.normalization_deviation > self.tol:
            out.append(
                f"normalization violated: deviation {self.normalization_deviation:.3e}"
            )
        return out


def realize(r: QuantumRealization) -> Assemblage:
    """sigma_{a|x} = tr_A[(M_{a|x} x I) rho_AB] for every (a, x)."""
    r.check()
    elements = {}
    settings = len(r.alice_povms)
    outcomes = len(next(iter(r.alice_povms.values())))
    for x, povm in r.alice_povms.items():
        for a, m in enumerate(povm):
            elements[(a, x)] = symmetrize(partial_trace_A(kron(m, I2) @ r.state))
    asm = Assemblage(outcomes, settings, elements)
    report = validate(asm, 1e-9)
    if not report.passed:
        raise ValidationError("; ".join(report.failures()))
    return asm


def chsh_reference() -> Assemblage:
    """The CHSH-type reference: Z/X measurements on the maximally
    entangled pair, all outcome probabilities 1/2."""
    elements = {
        (0, 0): projector(KET0) / 2,
        (1, 0): projector(KET1) / 2,
        (0, 1): projector(KET_PLUS) / 2,
        (1, 1): projector(KET_MINUS) / 2,
    }
    return Assemblage(2, 2, elements)


def from_classical(s: ClassicalStrategy, outcomes: int = 2, settings: int = 2) -> Assemblage:
    """sigma_{a|x} = sum_lambda p(lambda) [response(lambda,x)=a] rho_lambda."""
    s.check()
    elements = {
        (a, x): np.zeros((2, 2), dtype=complex)
        for a in range(outcomes)
        for x in range(settings)
    }
    for lam, w in s.weights.items():
        for x in range(settings):
            a = s.response[(lam, x)]
            if not 0 <= a < outcomes:
                raise ValidationError(f"response ({lam},{x}) -> {a} out of range")
            elements[(a, x)] = elements[(a, x)] + w * s.hidden_states[lam]
    asm = Assemblage(outcomes, settings, elements)
    report = validate(asm, 1e-10)
    if not report.passed:
        raise ValidationError("; ".join(report.failures()))
    return asm


def validate(asm: Assemblage, tol: float = 1e-10) -> ValidationReport:
    """Report PSD margins, no-signaling and normalization deviations."""
    psd_margin = min(
        min_eigval(symmetrize(m)) for m in asm.elements.values()
    )
    marginals = [asm.bob_marginal(x) for x in range(asm.settings)]
    ns_dev = 0.0
    for x in range(1, asm.settings):
        ns_dev = max(ns_dev, float(np.max(np.abs(marginals[x] - marginals[0]))))
    norm_dev = max(
        abs(float(np.trace(marg).real) - 1) for marg in marginals
    )
    return ValidationReport(psd_margin, ns_dev, norm_dev, tol)


# ---------------------------------------------------------------------------
# Random sampling

def _haar_unitary_2(rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_bloch(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def _bloch_projectors(n: np.ndarray):
    m0 = (I2 + n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z) / 2
    return [m0, I2 - m0]


def random_realization(
    rng: np.random.Generator,
    projective: bool = True,
    uniform_marginals: bool = False,
) -> QuantumRealization:
    """Sample a valid two-qubit realization.

    Default: Haar-random pure state mixed with white noise at random
    visibility, Alice measuring random rank-1 projective pairs (or random
    two-outcome POVMs when ``projective`` is off). With ``uniform_marginals``
    the pure state is a rotated maximally entangled pair, which pins every
    p(a|x) to 1/2 for projective measurements.
    """
    if uniform_marginals:
        phi = np.zeros(4, dtype=complex)
        phi[0] = phi[3] = 1 / math.sqrt(2)
        u = np.kron(_haar_unitary_2(rng), _haar_unitary_2(rng))
        psi = u @ phi
    else:
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
    v = rng.uniform(0.0, 1.0)
    state = v * np.outer(psi, psi.conj()) + (1 - v) * I4 / 4

    povms = {}
    for x in range(2):
        if projective or uniform_marginals:
            povms[x] = _bloch_projectors(_random_bloch(rng))
        else:
            u = _haar_unitary_2(rng)
            m0 = u @ np.diag(rng.uniform(0, 1, size=2)) @ u.conj().T
            povms[x] = [m0, I2 - m0]
    return QuantumRealization(state, povms)
