"""Fidelities: between qubit states, between assemblages, and the best
fidelity any classical (hidden-state) assemblage reaches with a pure
reference.

The classical optimum is solved exactly without an SDP solver: for fixed
deterministic responses the objective is linear in each hidden state, so
each inner optimum is the top eigenvalue of a response-indexed operator,
attained at the corresponding eigenvector.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .assemblage import (
    Assemblage,
    ClassicalStrategy,
    PROB_FLOOR,
    from_classical,
)
from .matkernel import (
    I2,
    PAULI_X,
    PAULI_Z,
    ValidationError,
    eigh_hermitian,
    eigvals_hermitian,
    min_eigval,
    symmetrize,
)


def _check_density(rho: np.ndarray, name: str, tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValidationError(f"{name} must be a 2x2 matrix")
    if abs(np.trace(rho).real - 1) > tol:
        raise ValidationError(f"{name} must have unit trace")
    if min_eigval(symmetrize(rho)) < -tol:
        raise ValidationError(f"{name} must be PSD")
    return rho


def state_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann-Jozsa fidelity, qubit closed form:
    F = tr(rho sigma) + 2 sqrt(det rho * det sigma)."""
    rho = _check_density(rho, "rho")
    sigma = _check_density(sigma, "sigma")
    overlap = float(np.trace(rho @ sigma).real)
    det_prod = max(0.0, float((np.linalg.det(rho) * np.linalg.det(sigma)).real))
    return min(1.0, overlap + 2 * math.sqrt(det_prod))


def assemblage_fidelity(ref: Assemblage, other: Assemblage) -> float:
    """Average-over-settings fidelity between assemblages:
    (1/|X|) sum_{a,x} sqrt(p*(a|x) p(a|x)) F(rho*_{a|x}, rho_{a|x}).

    Terms where either probability vanishes contribute zero.
    """
    if (ref.outcomes, ref.settings) != (other.outcomes, other.settings):
        raise ValidationError("assemblages must share |A| and |X|")
    total = 0.0
    for x in range(ref.settings):
        for a in range(ref.outcomes):
            p_ref = ref.prob(a, x)
            p = other.prob(a, x)
            if p_ref < PROB_FLOOR or p < PROB_FLOOR:
                continue
            total += math.sqrt(p_ref * p) * state_fidelity(
                ref.conditional_state(a, x), other.conditional_state(a, x)
            )
    return total / ref.settings


def classical_fidelity(ref: Assemblage):
    """Best fidelity of any classical assemblage with a pure reference.

    Enumerates all |A|^|X| deterministic responses lambda. Each hidden
    state enters linearly, so its optimum over the density-matrix simplex
    sits at a pure state: the top eigenvector of

        M_lambda = sqrt(|A|)/(|X| |A|^|X|) * sum_x sqrt(p*(lambda_x|x)) rho*_{lambda_x|x}.

    Returns (value, strategy) where the strategy mixes all responses
    uniformly with the maximizing pure hidden states.
    """
    n_a, n_x = ref.outcomes, ref.settings
    for x in range(n_x):
        for a in range(n_a):
            if ref.prob(a, x) < PROB_FLOOR:
                continue
            evs = eigvals_hermitian(ref.conditional_state(a, x))
            if evs[0] > 1e-9:
                raise ValidationError(
                    "classical_fidelity requires pure (rank-1) reference elements"
                )

    responses = list(itertools.product(range(n_a), repeat=n_x))
    prefactor = math.sqrt(n_a) / (n_x * len(responses))
    value = 0.0
    weights, response, hidden = {}, {}, {}
    for lam, resp in enumerate(responses):
        m = np.zeros((2, 2), dtype=complex)
        for x, a in enumerate(resp):
            p = ref.prob(a, x)
            if p >= PROB_FLOOR:
                m += math.sqrt(p) * ref.conditional_state(a, x)
        m *= prefactor
        vals, vecs = eigh_hermitian(m)
        value += float(vals[-1])
        top = vecs[:, -1]
        weights[lam] = 1.0 / len(responses)
        hidden[lam] = np.outer(top, top.conj())
        for x, a in enumerate(resp):
            response[(lam, x)] = a
    return value, ClassicalStrategy(weights, response, hidden)


def appendix_b_strategy() -> ClassicalStrategy:
    """Two-state classical strategy saturating the classical fidelity with
    the CHSH-type reference: Alice copies the shared bit, Bob outputs a
    pure state polarized along +-(Z+X)/sqrt(2)."""
    diag = (PAULI_Z + PAULI_X) / math.sqrt(2)
    rho_plus = (I2 + diag) / 2
    rho_minus = (I2 - diag) / 2
    return ClassicalStrategy(
        weights={0: 0.5, 1: 0.5},
        response={(0, 0): 0, (0, 1): 0, (1, 0): 1, (1, 1): 1},
        hidden_states={0: rho_plus, 1: rho_minus},
    )
