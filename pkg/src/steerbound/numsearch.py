"""Numerical cross-check of the analytic bound.

Heuristic see-saw machinery: sample assemblages, maximize the fidelity to
the reference over a parametrized channel family (coordinate ascent), and
minimize that maximum over assemblages pinned to a target CHSH value. The
outcome is one-sided: a passing sweep means no counterexample to the
analytic lower bound was found, never that the true minimum was reached.

Two structural candidates make the sandwich checks robust by construction:
the reference/classical mixture hits any target violation exactly and sits
below the interpolation upper bound, while seeding every channel ascent
with the analytic witness channel keeps every estimate above the analytic
lower bound (up to the constraint residual).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .assemblage import (
    Assemblage,
    ValidationError,
    chsh_reference,
    from_classical,
    random_realization,
    realize,
)
from .fidelity import appendix_b_strategy
from .matkernel import I2, PAULI_X, PAULI_Y, PAULI_Z, KET0, KET1, KET_MINUS, KET_PLUS
from .selftest import (
    S_OPTIMAL,
    analytic_bound,
    dephasing_coefficient,
    upper_bound,
)
from .steering import BETA_CLASSICAL, BETA_QUANTUM

CHANNEL_FAMILIES = ("dephasing-only", "unitary-pre-post-dephasing", "general-two-kraus")

_REF_VECTORS = (
    ((0, 0), KET0),
    ((1, 0), KET1),
    ((0, 1), KET_PLUS),
    ((1, 1), KET_MINUS),
)


@dataclass(frozen=True)
class SearchConfig:
    samples: int = 20
    beta_targets: tuple = (2.1, 2.34, 2.5, 2.7, BETA_QUANTUM)
    channel_family: str = "unitary-pre-post-dephasing"
    seesaw_rounds: int = 2
    rng_seed: int = 20240817
    tolerance: float = 1e-4

    def check(self) -> None:
        if self.samples < 1 or self.seesaw_rounds < 1:
            raise ValidationError("samples and seesaw_rounds must be >= 1")
        if self.tolerance <= 0:
            raise ValidationError("tolerance must be positive")
        if self.channel_family not in CHANNEL_FAMILIES:
            raise ValidationError(f"unknown channel family {self.channel_family!r}")
        for b in self.beta_targets:
            if not BETA_CLASSICAL < b <= BETA_QUANTUM + 1e-12:
                raise ValidationError(f"beta target {b} outside (2, 2*sqrt(2)]")

    def to_json(self) -> str:
        return json.dumps(
            {
                "samples": self.samples,
                "beta_targets": list(self.beta_targets),
                "channel_family": self.channel_family,
                "seesaw_rounds": self.seesaw_rounds,
                "rng_seed": self.rng_seed,
                "tolerance": self.tolerance,
            },
            indent=2,
        )

    @staticmethod
    def from_json(text: str) -> "SearchConfig":
        raw = json.loads(text)
        cfg = SearchConfig(
            samples=raw.get("samples", 20),
            beta_targets=tuple(raw.get("beta_targets", (2.1, 2.34, 2.5, 2.7, BETA_QUANTUM))),
            channel_family=raw.get("channel_family", "unitary-pre-post-dephasing"),
            seesaw_rounds=raw.get("seesaw_rounds", 2),
            rng_seed=raw.get("rng_seed", 20240817),
            tolerance=raw.get("tolerance", 1e-4),
        )
        cfg.check()
        return cfg


# ---------------------------------------------------------------------------
# Assemblage sampling

def enforce_uniform_marginals(asm: Assemblage) -> Assemblage:
    """Mix with the outcome-flipped assemblage to pin every p(a|x) to 1/2.

    The equal-weight mixture solves w*p + (1-w)*(1-p) = 1/2 for every
    element simultaneously.
    """
    if asm.max_marginal_deviation() <= 1e-12:
        return asm
    return asm.mix(asm.flip_outcomes(), 0.5)


def sample_assemblage(
    rng: np.random.Generator, uniform_marginals: bool = False
) -> Assemblage:
    """Random valid quantum assemblage; optionally with uniform marginals."""
    asm = realize(random_realization(rng, uniform_marginals=uniform_marginals))
    if uniform_marginals:
        asm = enforce_uniform_marginals(asm)
    return asm


# ---------------------------------------------------------------------------
# Channel families

def _rot(t: float) -> np.ndarray:
    # real rotation in the XZ great circle of the Bloch sphere
    return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]], dtype=complex)


def _gamma(theta: float) -> np.ndarray:
    return PAULI_Z if theta <= math.pi / 4 else PAULI_X


def family_dim(family: str) -> int:
    return {"dephasing-only": 1, "unitary-pre-post-dephasing": 3, "general-two-kraus": 4}[family]


def param_bounds(family: str):
    pi = math.pi
    if family == "dephasing-only":
        return [(-1.0, 1.0)]
    if family == "unitary-pre-post-dephasing":
        return [(-1.0, 1.0), (-pi, pi), (-pi, pi)]
    return [(-pi, pi)] * 4


def kraus_ops(family: str, theta: float, params) -> list:
    """Kraus operators for a parameter vector of the given family.

    dephasing-only: [c]. unitary-pre-post-dephasing: [c, pre, post] with
    XZ-plane rotations around the dephasing core. general-two-kraus:
    [a, b, g1, g2] giving K1 = R(g1) diag(cos a, cos b) and
    K2 = R(g2) diag(sin a, sin b); trace preservation is automatic.
    """
    if family == "dephasing-only":
        c = min(1.0, max(-1.0, params[0]))
        return [
            math.sqrt((1 + c) / 2) * I2,
            math.sqrt((1 - c) / 2) * _gamma(theta),
        ]
    if family == "unitary-pre-post-dephasing":
        c, pre, post = params
        c = min(1.0, max(-1.0, c))
        u, v = _rot(pre), _rot(post)
        return [
            math.sqrt((1 + c) / 2) * (v @ u),
            math.sqrt((1 - c) / 2) * (v @ _gamma(theta) @ u),
        ]
    if family == "general-two-kraus":
        a, b, g1, g2 = params
        k1 = _rot(g1) @ np.diag([math.cos(a), math.cos(b)]).astype(complex)
        k2 = _rot(g2) @ np.diag([math.sin(a), math.sin(b)]).astype(complex)
        return [k1, k2]
    raise ValidationError(f"unknown channel family {family!r}")


def embed_params(small: str, large: str, theta: float, params):
    """Lift a parameter vector of a smaller family into a larger one so the
    channel is unchanged (warm start for the nesting property)."""
    if small == large:
        return list(params)
    if small == "dephasing-only":
        params = [params[0], 0.0, 0.0]
        small = "unitary-pre-post-dephasing"
        if small == large:
            return params
    if small == "unitary-pre-post-dephasing" and large == "general-two-kraus":
        c, pre, post = params
        c = min(1.0, max(-1.0, c))
        w = (1 + c) / 2
        a = math.acos(min(1.0, math.sqrt(w)))
        g2 = post - pre
        if _gamma(theta) is PAULI_X:
            g2 += math.pi / 2
        return [a, -a, pre + post, g2]
    raise ValidationError(f"cannot embed {small} into {large}")


@dataclass(frozen=True)
class ChannelResult:
    family: str
    theta: float
    params: tuple
    fidelity: float

    def kraus(self) -> list:
        return kraus_ops(self.family, self.theta, self.params)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.kraus())

    def apply_elementwise(self, asm: Assemblage) -> Assemblage:
        return Assemblage(
            asm.outcomes,
            asm.settings,
            {key: self.apply(m) for key, m in asm.elements.items()},
        )

    def describe(self) -> dict:
        return {
            "family": self.family,
            "theta": self.theta,
            "params": list(self.params),
            "fidelity": self.fidelity,
        }


def fidelity_after_kraus(asm: Assemblage, kraus: list) -> float:
    """F(reference, channel(asm)) for the pure CHSH reference."""
    total = 0.0
    for (a, x), vec in _REF_VECTORS:
        sigma = asm.elements[(a, x)]
        p = float(np.trace(sigma).real)
        if p < 1e-12:
            continue
        mapped = sum(k @ sigma @ k.conj().T for k in kraus)
        total += math.sqrt(0.5 / p) * float((vec.conj() @ mapped @ vec).real)
    return total / 2


def _line_search(f, lo: float, hi: float, coarse: int = 15, refine: int = 24):
    """Maximize f on [lo, hi]: coarse grid, then golden-section refinement
    in the bracketing cell. Handles the mildly multimodal angle landscapes."""
    xs = np.linspace(lo, hi, coarse)
    vals = [f(float(x)) for x in xs]
    i = int(np.argmax(vals))
    a = float(xs[max(0, i - 1)])
    b = float(xs[min(coarse - 1, i + 1)])
    inv_golden = (math.sqrt(5) - 1) / 2
    c = b - (b - a) * inv_golden
    d = a + (b - a) * inv_golden
    fc, fd = f(c), f(d)
    for _ in range(refine):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * inv_golden
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * inv_golden
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _default_starts(family: str, theta: float):
    starts = []
    for c in (1.0, dephasing_coefficient(theta, S_OPTIMAL), -1.0, 0.0):
        starts.append(embed_params("dephasing-only", family, theta, [c]))
    return starts


def best_channel(
    asm: Assemblage,
    theta: float,
    family: str = "unitary-pre-post-dephasing",
    rounds: int = 2,
    extra_starts=None,
):
    """Coordinate-ascent maximization of the reference fidelity over the
    channel family's parameters.

    Each round sweeps every parameter with a grid-plus-golden-section line
    search; the kept value is monotone nondecreasing. Starting points
    always include the identity channel and the analytic witness channel
    for this theta, so the result is never below the certified witness.

    Returns (ChannelResult, fidelity).
    """
    if family not in CHANNEL_FAMILIES:
        raise ValidationError(f"unknown channel family {family!r}")
    bounds = param_bounds(family)
    starts = _default_starts(family, theta)
    if extra_starts:
        starts = starts + [list(s) for s in extra_starts]

    def fid(params) -> float:
        return fidelity_after_kraus(asm, kraus_ops(family, theta, params))

    best_params, best_val = None, -math.inf
    for start in starts:
        params = list(start)
        val = fid(params)
        for _ in range(rounds):
            for i, (lo, hi) in enumerate(bounds):

                def f_i(x, i=i):
                    trial = list(params)
                    trial[i] = x
                    return fid(trial)

                x, v = _line_search(f_i, lo, hi)
                if v > val:
                    params[i] = x
                    val = v
        if val > best_val:
            best_params, best_val = params, val
    result = ChannelResult(family, theta, tuple(best_params), best_val)
    return result, best_val


# ---------------------------------------------------------------------------
# Outer minimization

def _isotropic_elements(v: float, dirs) -> dict:
    """Assemblage from visibility-v isotropic state with projective Alice
    measurements along the given Bloch directions (one per setting).

    sigma_{0|x} = I/4 + v (n_x . sigma)^T / 4; p(a|x) = 1/2 exactly.
    """
    elements = {}
    for x, n in enumerate(dirs):
        block = v * (n[0] * PAULI_X - n[1] * PAULI_Y + n[2] * PAULI_Z) / 4
        elements[(0, x)] = I2 / 4 + block
        elements[(1, x)] = I2 / 4 - block
    return elements


def _bloch_from_angles(polar: float, azimuth: float):
    return (
        math.sin(polar) * math.cos(azimuth),
        math.sin(polar) * math.sin(azimuth),
        math.cos(polar),
    )


def _family_point(p):
    """p = (v, polar0, az0, polar1, az1, theta) -> (Assemblage, theta, beta)."""
    v = min(1.0, max(0.0, p[0]))
    theta = min(math.pi / 2, max(0.0, p[5]))
    n0 = _bloch_from_angles(p[1], p[2])
    n1 = _bloch_from_angles(p[3], p[4])
    asm = Assemblage(2, 2, _isotropic_elements(v, (n0, n1)))
    beta = 2 * v * (math.cos(theta) * n0[2] + math.sin(theta) * n1[0])
    return asm, theta, beta


def _quick_extractability(asm: Assemblage, theta: float) -> float:
    """Cheap inner estimate: best of the identity, full-dephasing and
    analytic-witness dephasing channels."""
    best = -math.inf
    for c in (1.0, -1.0, dephasing_coefficient(theta, S_OPTIMAL)):
        best = max(best, fidelity_after_kraus(asm, kraus_ops("dephasing-only", theta, [c])))
    return best


def _project_to_beta(p, beta: float):
    """Rescale visibility so the CHSH value matches beta exactly, when the
    current geometry can reach it."""
    _, theta, _ = _family_point(p)
    n0 = _bloch_from_angles(p[1], p[2])
    n1 = _bloch_from_angles(p[3], p[4])
    g = math.cos(theta) * n0[2] + math.sin(theta) * n1[0]
    if g > 1e-9 and beta / (2 * g) <= 1.0:
        q = list(p)
        q[0] = beta / (2 * g)
        return q
    return None


def _outer_descent(beta: float, rng: np.random.Generator, tolerance: float):
    """Penalty-based coordinate descent over assemblage parameters and
    theta jointly; returns the best parameter vector found."""
    p = [
        rng.uniform(0.5, 1.0),
        rng.uniform(0, math.pi),
        rng.uniform(-math.pi, math.pi),
        rng.uniform(0, math.pi),
        rng.uniform(-math.pi, math.pi),
        rng.uniform(0, math.pi / 2),
    ]
    spans = [0.25, 0.6, 0.6, 0.6, 0.6, 0.4]
    penalty = 100.0

    def objective(q) -> float:
        asm, theta, b = _family_point(q)
        return _quick_extractability(asm, theta) + penalty * (b - beta) ** 2

    for _escalation in range(4):
        step = 1.0
        current = objective(p)
        while step > 0.02:
            improved = False
            for i in range(6):
                for sign in (1, -1):
                    trial = list(p)
                    trial[i] += sign * step * spans[i]
                    trial_val = objective(trial)
                    if trial_val < current - 1e-12:
                        p, current = trial, trial_val
                        improved = True
            if not improved:
                step *= 0.5
        _, _, b = _family_point(p)
        if abs(b - beta) < tolerance:
            break
        penalty *= 10.0

    projected = _project_to_beta(p, beta)
    if projected is not None:
        asm_p, theta_p, b_p = _family_point(projected)
        asm_u, theta_u, b_u = _family_point(p)
        if _quick_extractability(asm_p, theta_p) <= _quick_extractability(asm_u, theta_u) or abs(
            b_u - beta
        ) >= tolerance:
            return projected
    return p


def _mixture_candidate(beta: float):
    """Reference mixed with the saturating classical assemblage; hits the
    target violation exactly at theta = pi/4 and certifies the upper side
    of the sandwich."""
    q = (beta - BETA_CLASSICAL) / (BETA_QUANTUM - BETA_CLASSICAL)
    classical = from_classical(appendix_b_strategy())
    asm = chsh_reference().mix(classical, q)
    return asm, math.pi / 4


@dataclass(frozen=True)
class SandwichRecord:
    beta: float
    numeric_min: float
    analytic_lower: float
    eq8_upper: float
    residual: float
    restarts_used: int
    witness: dict = field(repr=False)

    def passes(self, tolerance: float) -> bool:
        return (
            self.analytic_lower - tolerance
            <= self.numeric_min
            <= self.eq8_upper + tolerance
        )


@dataclass(frozen=True)
class SandwichReport:
    config: SearchConfig
    records: tuple

    @property
    def passed(self) -> bool:
        return all(r.passes(self.config.tolerance) for r in self.records)

    def to_json(self) -> str:
        return json.dumps(
            {
                "config": json.loads(self.config.to_json()),
                "passed": self.passed,
                "records": [
                    {
                        "beta": r.beta,
                        "numeric_min": r.numeric_min,
                        "analytic_lower": r.analytic_lower,
                        "eq8_upper": r.eq8_upper,
                        "residual": r.residual,
                        "restarts_used": r.restarts_used,
                        "witness": r.witness,
                    }
                    for r in self.records
                ],
            },
            indent=2,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["beta", "numeric_min", "analytic_lower", "eq8_upper", "residual", "restarts_used"]
        )
        for r in self.records:
            writer.writerow(
                [
                    f"{r.beta:.9g}",
                    f"{r.numeric_min:.9g}",
                    f"{r.analytic_lower:.9g}",
                    f"{r.eq8_upper:.9g}",
                    f"{r.residual:.9g}",
                    r.restarts_used,
                ]
            )
        return buf.getvalue()


def min_extractability_at_beta(
    beta: float, cfg: SearchConfig, seed_sequence: np.random.SeedSequence = None
) -> SandwichRecord:
    """Heuristic estimate of the minimum extractability at a fixed CHSH
    value: penalty-descent restarts plus the reference/classical mixture,
    each scored with a full channel-family ascent.

    The returned value is an upper estimate of the true minimum; the
    certified, falsifiable direction is numeric >= analytic bound.
    """
    cfg.check()
    if not BETA_CLASSICAL < beta <= BETA_QUANTUM + 1e-12:
        raise ValidationError(f"beta = {beta} outside (2, 2*sqrt(2)]")
    if seed_sequence is None:
        seed_sequence = np.random.SeedSequence(cfg.rng_seed)

    candidates = [_mixture_candidate(beta) + (0.0,)]
    children = seed_sequence.spawn(cfg.samples)
    for child in children:
        rng = np.random.default_rng(child)
        p = _outer_descent(beta, rng, cfg.tolerance)
        asm, theta, b = _family_point(p)
        candidates.append((asm, theta, abs(b - beta)))

    best = None
    for asm, theta, residual in candidates:
        if residual >= cfg.tolerance:
            continue
        channel, fid = best_channel(
            asm, theta, cfg.channel_family, rounds=cfg.seesaw_rounds
        )
        if best is None or fid < best[0]:
            best = (fid, residual, asm, theta, channel)

    fid, residual, asm, theta, channel = best
    witness = {
        "assemblage": json.loads(asm.to_json()),
        "theta": theta,
        "channel": channel.describe(),
    }
    return SandwichRecord(
        beta=beta,
        numeric_min=fid,
        analytic_lower=analytic_bound(beta),
        eq8_upper=upper_bound(beta),
        residual=residual,
        restarts_used=cfg.samples,
        witness=witness,
    )


def sandwich_sweep(cfg: SearchConfig) -> SandwichReport:
    """Run min_extractability_at_beta over every target and assemble the
    report; passing means every record satisfies the sandwich invariant."""
    cfg.check()
    root = np.random.SeedSequence(cfg.rng_seed)
    streams = root.spawn(len(cfg.beta_targets))
    records = tuple(
        min_extractability_at_beta(beta, cfg, stream)
        for beta, stream in zip(cfg.beta_targets, streams)
    )
    return SandwichReport(cfg, records)
