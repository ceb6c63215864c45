"""Verification procedures that turn a symbol triple into a pass/fail report.

Each check builds the truncated relations it needs, measures a handful of
named metrics and compares the gated ones against tolerances. A report passes
exactly when every gated metric is within its bound; everything else in
``metrics`` is diagnostic.

Pairing identities between closed-form generators are exact up to rounding.
Graph comparisons between truncated subspaces are approximate, because the
compression of a relation's adjoint is not the adjoint of its compression.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .fock import KernelSpec, kernel_vector, sup_m_estimate, vanishing_subspace
from .linalg import coordinate_subspace, embed, max_angle, project
from .relation import (
    adjoint,
    domain,
    is_hermitian,
    is_unitary,
    multivalued_part,
    quotient_lower_bound,
    relation_norm,
    s_adjoint,
    window,
)
from .symbols import (
    ConjugationParams,
    SymbolTriple,
    build_smax,
    classify_bounded_domain_condition,
    classify_c_selfadjoint,
    classify_hermitian,
    classify_unitary,
    conjugation_matrix,
    default_budget,
    smax_adjoint_generators,
    smax_generators,
    vartheta_pair,
    wco_matrix,
)

DEFAULT_TOLERANCES = {
    "exact_angle": 1e-10,
    "domain_angle": 1e-8,
    "exclusion_residual": 1e-3,
    "pairing": 1e-8,
    "graph_angle": 1e-3,
    "hermitian_angle": 1e-6,
    "unitary_block": 1e-6,
    "lower_bound": 1e-6,
    "lower_bound_drift": 0.2,
    "norm_drift": 0.05,
    "trend_floor": 1e-12,
}

# Ratio between a "must fail" residual and the pass tolerance.
FAIL_MARGIN = 10.0

# Evaluation points for z-dependent assertions.
TEST_GRID = (0, 0.5, -0.5, 0.5j, -0.5j, 0.5 + 0.5j, 0.5 - 0.5j, -0.5 + 0.5j, -0.5 - 0.5j)

CONVERGENCE_STEP = 10

# Extra coefficients used when evaluating pairings of closed-form generators.
# The generators are entire functions; the pad keeps the truncation tail of
# products such as <g, C u> out of an identity that holds exactly.
PAIRING_PAD = 20


def _encode(value):
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return value


@dataclass
class CheckReport:
    check_name: str
    claim: str
    parameters: dict
    truncation: int
    degree_budget: int
    metrics: dict
    gates: dict
    tolerance_used: float
    passed: bool = field(init=False)
    notes: list = field(default_factory=list)

    def __post_init__(self):
        missing = set(self.gates) - set(self.metrics)
        if missing:
            raise ValueError(f"gated metrics without values: {sorted(missing)}")
        self.passed = all(_gate_ok(self.metrics[k], op, bound) for k, (op, bound) in self.gates.items())

    def failed_gates(self) -> list[str]:
        return [k for k, (op, bound) in self.gates.items() if not _gate_ok(self.metrics[k], op, bound)]

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "claim": self.claim,
            "parameters": _encode(self.parameters),
            "truncation": self.truncation,
            "degree_budget": self.degree_budget,
            "metrics": _encode(self.metrics),
            "gates": {k: [op, bound] for k, (op, bound) in self.gates.items()},
            "passed": self.passed,
            "tolerance_used": self.tolerance_used,
            "notes": list(self.notes),
        }


def _gate_ok(value, op: str, bound: float) -> bool:
    if op == "<=":
        return value <= bound
    if op == ">=":
        return value >= bound
    if op == "==":
        return value == bound
    raise ValueError(f"unknown gate operator {op!r}")


def _tols(overrides: Optional[dict]) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    if overrides:
        unknown = set(overrides) - set(tol)
        if unknown:
            raise KeyError(f"unknown tolerance names: {sorted(unknown)}")
        tol.update(overrides)
    return tol


def _params(t: SymbolTriple, p: Optional[ConjugationParams] = None) -> dict:
    out = {"triple": t.as_dict()}
    if p is not None:
        out["conjugation"] = p.as_dict()
    return out


def _budget(N: int, budget: Optional[int]) -> int:
    return default_budget(N) if budget is None else budget


# ---------------------------------------------------------------- pairings


def _pair_matrices(pairs):
    F = np.column_stack([q.f.coeffs for q in pairs])
    G = np.column_stack([q.g.coeffs for q in pairs])
    scale = np.linalg.norm(np.vstack([F, G]), axis=0)
    scale[scale == 0] = 1.0
    return F / scale, G / scale


def pairing_residual(pairs, others, transform: Optional[Callable] = None) -> float:
    """max |<g, T u> - <f, T v>| / ((1 + ||f||)(1 + ||u||)) over generator cross-pairs.

    Generators are normalized to unit length first. ``transform`` maps a
    matrix of coefficient columns to its image (identity if omitted).
    """
    F, G = _pair_matrices(pairs)
    U, V = _pair_matrices(others)
    if transform is not None:
        U, V = transform(U), transform(V)
    lhs = U.conj().T @ G  # [j, i] = <g_i, u_j>
    rhs = V.conj().T @ F
    nf = np.linalg.norm(F, axis=0)
    nu = np.linalg.norm(U, axis=0)
    scale = np.outer(1 + nu, 1 + nf)
    return float(np.max(np.abs(lhs - rhs) / scale))


def _conjugation_transform(M):
    return lambda X: M @ np.conj(X)


# ---------------------------------------------------------------- checks


def check_multivalued_part(t: SymbolTriple, N: int, budget: Optional[int] = None,
                           tolerances: Optional[dict] = None) -> CheckReport:
    tol = _tols(tolerances)
    budget = _budget(N, budget)
    mul = multivalued_part(build_smax(t, N, budget))
    target = coordinate_subspace(N + 1, range(t.m))
    angle = max_angle(mul, target)
    metrics = {"dim": mul.dim, "expected_dim": t.m, "max_angle": angle}
    gates = {"dim": ("==", t.m), "max_angle": ("<=", tol["exact_angle"])}
    return CheckReport("multivalued_part", "the multivalued part is the polynomials of degree below m",
                       _params(t), N, budget, metrics, gates, tol["exact_angle"])


def _target_domain(t: SymbolTriple, N: int, budget: int):
    w0 = t.vanishing_root()
    if w0 is None:
        return coordinate_subspace(N + 1, range(budget + 1)), None
    return embed(vanishing_subspace(t.m, w0, t.m + budget), N + 1), w0


def check_domain_closure(t: SymbolTriple, N: int, budget: Optional[int] = None,
                         p: Optional[ConjugationParams] = None,
                         tolerances: Optional[dict] = None) -> CheckReport:
    """Domain against the vanishing-order-m space, plus exclusion of low-order kernels.

    The exclusion residual is measured against the whole truncated
    vanishing space, not only the budgeted domain, so that high-degree tails
    cannot fake a large residual.
    """
    tol = _tols(tolerances)
    budget = _budget(N, budget)
    dom = domain(build_smax(t, N, budget))
    target, w0 = _target_domain(t, N, budget)
    metrics = {"dim": dom.dim, "expected_dim": target.dim, "max_angle": max_angle(dom, target)}
    gates = {"dim": ("==", target.dim), "max_angle": ("<=", tol["domain_angle"])}
    notes = []
    if w0 is not None:
        if p is not None and t.matches_adjoint_form(p.a, p.b):
            a, b = p.a, p.b
        else:
            a, b = 1.0, -w0
        full = vanishing_subspace(t.m, w0, N)
        worst_full, worst_dom = math.inf, math.inf
        for z in TEST_GRID:
            for k in range(t.m):
                v = kernel_vector(KernelSpec(z, a, b, k), N).coeffs
                nv = np.linalg.norm(v)
                worst_full = min(worst_full, np.linalg.norm(v - project(full, v)) / nv)
                worst_dom = min(worst_dom, np.linalg.norm(v - project(dom, v)) / nv)
        metrics["min_exclusion_residual"] = float(worst_full)
        metrics["min_exclusion_residual_budgeted"] = float(worst_dom)
        gates["min_exclusion_residual"] = (">=", tol["exclusion_residual"])
    else:
        notes.append("no forced root: the domain is every polynomial within the budget")
    return CheckReport("domain_closure", "the domain closure is the space vanishing to order m at the forced root",
                       _params(t, p), N, budget, metrics, gates, tol["domain_angle"], notes)


def _windowed_adjoint_angle(t, p, N, budget) -> tuple[float, int, int]:
    K = t.m + budget
    S = smax_generators(t, N, budget).relation()
    Shat = smax_adjoint_generators(t, p, N, budget).relation()
    left, right = window(adjoint(S), K), window(Shat, K)
    return max_angle(left.graph, right.graph), left.dim, right.dim


def _adjoint_pairing(t, p, N, budget) -> float:
    S = smax_generators(t, N, budget)
    Shat = smax_adjoint_generators(t, p, N, budget)
    return pairing_residual(S.all_pairs(), Shat.all_pairs())


def check_adjoint_theorem(t: SymbolTriple, p: ConjugationParams, N: int, budget: Optional[int] = None,
                          tolerances: Optional[dict] = None) -> CheckReport:
    """Closed-form adjoint against the numerical adjoint.

    Gated: the generator pairing (exact up to rounding), the kernel-pair
    pairing on the test grid, and the windowed graph angle at N together with
    its trend at N + 10. The trend gate allows 10% growth above an absolute
    rounding floor.
    """
    tol = _tols(tolerances)
    budget = _budget(N, budget)
    Np = N + PAIRING_PAD
    pairing = _adjoint_pairing(t, p, Np, budget)
    Shat = smax_adjoint_generators(t, p, Np, budget)
    kernel_pairs = [vartheta_pair(t, p, z, k, Np) for z in TEST_GRID for k in range(t.m, t.m + 3)]
    kernel_pairing = pairing_residual(kernel_pairs, Shat.all_pairs())
    angle, dim_left, dim_right = _windowed_adjoint_angle(t, p, N, budget)
    N2 = N + CONVERGENCE_STEP
    angle_next, _, _ = _windowed_adjoint_angle(t, p, N2, budget)
    raw = _adjoint_pairing(t, p, N, budget)
    raw_next = _adjoint_pairing(t, p, N2, budget)
    floor = tol["trend_floor"]
    metrics = {
        "pairing": pairing,
        "kernel_pairing": kernel_pairing,
        "window_angle": angle,
        "window_angle_next": angle_next,
        "window_angle_growth": max(0.0, angle_next - 1.1 * angle),
        "pairing_truncated": raw,
        "pairing_truncated_next": raw_next,
        "pairing_truncated_growth": max(0.0, raw_next - 1.1 * raw),
        "window_dim_numerical": dim_left,
        "window_dim_closed_form": dim_right,
    }
    gates = {
        "pairing": ("<=", tol["pairing"]),
        "kernel_pairing": ("<=", tol["pairing"]),
        "window_angle": ("<=", tol["graph_angle"]),
        "window_angle_growth": ("<=", floor),
        "window_dim_numerical": ("==", dim_right),
    }
    notes = [
        "graph comparison is approximate: windowed to degrees <= m + budget",
        f"pairings evaluated with {PAIRING_PAD} extra coefficients",
    ]
    return CheckReport("adjoint", "the adjoint of S_max is the closed-form relation S_hat",
                       _params(t, p), N, budget, metrics, gates, tol["pairing"], notes)


def _c_pairing(t, p, N, budget) -> float:
    pairs = smax_generators(t, N, budget).all_pairs()
    return pairing_residual(pairs, pairs, _conjugation_transform(conjugation_matrix(p, N)))


def _c_selfadjoint_metrics(t, p, N, budget) -> dict:
    S = build_smax(t, N, budget)
    T = s_adjoint(S, conjugation_matrix(p, N), antilinear=True)
    return {
        "pairing": _c_pairing(t, p, N + PAIRING_PAD, budget),
        "pairing_truncated": _c_pairing(t, p, N, budget),
        "graph_angle": max_angle(S.graph, T.graph),
        "graph_dim": S.dim,
        "s_adjoint_dim": T.dim,
    }


def check_c_selfadjoint_theorem(t: SymbolTriple, p: ConjugationParams, N: int, budget: Optional[int] = None,
                                tolerances: Optional[dict] = None) -> CheckReport:
    """C-pairing <g, C u> = <f, C v> on all generator pairs and graph containment in the C-adjoint.

    The graph metric is the largest principal angle of the (smaller) graph
    against its C-adjoint, i.e. a containment test.
    """
    tol = _tols(tolerances)
    budget = _budget(N, budget)
    cls = classify_c_selfadjoint(t, p)
    metrics = _c_selfadjoint_metrics(t, p, N, budget)
    metrics["classifier_positive"] = int(cls.positive)
    if cls.positive:
        consistent = metrics["pairing"] <= tol["pairing"] and metrics["graph_angle"] <= tol["graph_angle"]
    else:
        consistent = metrics["pairing"] >= FAIL_MARGIN * tol["pairing"]
    metrics["classifier_consistent"] = int(consistent)
    gates = {"pairing": ("<=", tol["pairing"]), "graph_angle": ("<=", tol["graph_angle"])}
    notes = [] if cls.positive else [f"classifier: {cls.witness}"]
    return CheckReport("c_selfadjoint", "S_max is C-selfadjoint for the given conjugation",
                       _params(t, p), N, budget, metrics, gates, tol["pairing"], notes)


def companion_conjugation(t: SymbolTriple) -> ConjugationParams:
    """Conjugation under which hermitian triples are also C-selfadjoint.

    (conj(B)/B, 0, 1) when B != 0, else (1, 0, 1).
    """
    if t.B == 0:
        return ConjugationParams(1.0, 0.0, 1.0)
    return ConjugationParams(t.B.conjugate() / t.B, 0.0, 1.0)


def check_hermitian_theorem(t: SymbolTriple, N: int, budget: Optional[int] = None,
                            tolerances: Optional[dict] = None) -> CheckReport:
    """Identity-pairing symmetry and graph equality with the numerical adjoint.

    Graph equality is measured with the budget N - m, where the truncated
    relation and its adjoint have matching dimensions. The C-selfadjoint check
    under ``companion_conjugation`` is reported alongside.
    """
    tol = _tols(tolerances)
    budget = _budget(N, budget)
    cls = classify_hermitian(t)
    pairs = smax_generators(t, N + PAIRING_PAD, budget).all_pairs()
    pairing = pairing_residual(pairs, pairs)
    full = is_hermitian(build_smax(t, N, N - t.m), tol["hermitian_angle"])
    companion = check_c_selfadjoint_theorem(t, companion_conjugation(t), N, budget, tolerances)
    metrics = {
        "pairing": pairing,
        "graph_angle": full.max_angle,
        "graph_dims_match": int(full.dims[0] == full.dims[1]),
        "classifier_positive": int(cls.positive),
        "companion_pairing": companion.metrics["pairing"],
        "companion_graph_angle": companion.metrics["graph_angle"],
        "companion_passed": int(companion.passed),
    }
    if cls.positive:
        consistent = pairing <= tol["pairing"]
    else:
        consistent = pairing >= FAIL_MARGIN * tol["pairing"]
    metrics["classifier_consistent"] = int(consistent)
    gates = {
        "pairing": ("<=", tol["pairing"]),
        "graph_angle": ("<=", tol["hermitian_angle"]),
        "graph_dims_match": ("==", 1),
    }
    notes = [] if cls.positive else [f"classifier: {cls.witness}"]
    return CheckReport("hermitian", "S_max is hermitian", _params(t), N, budget, metrics, gates,
                       tol["pairing"], notes)


def check_unitary_theorem(t: SymbolTriple, N: int, budget: Optional[int] = None,
                          tolerances: Optional[dict] = None) -> CheckReport:
    tol = _tols(tolerances)
    cls = classify_unitary(t)
    metrics = {"classifier_positive": int(cls.positive)}
    notes = [] if cls.positive else [f"classifier: {cls.witness}"]
    if t.m == 0:
        budget = _budget(N, budget)
        M = wco_matrix(t.C, t.D, t.A, t.B, N)
        k = N // 3
        block = (M.conj().T @ M)[:k, :k]
        metrics["gram_block_error"] = float(np.max(np.abs(block - np.eye(k))))
        metrics["block_size"] = k
        gates = {"gram_block_error": ("<=", tol["unitary_block"])}
    else:
        budget = N - t.m
        cmp = is_unitary(build_smax(t, N, budget), tol["unitary_block"])
        metrics["unitary_angle"] = cmp.max_angle
        metrics["multivalued_dim"] = cmp.multivalued_dim
        gates = {"unitary_angle": ("<=", tol["unitary_block"]), "multivalued_dim": ("==", 0)}
        if cmp.multivalued_dim:
            notes.append(
                f"multivalued part has dimension {cmp.multivalued_dim}, "
                "while the inverse graph of a unitary relation must be single-valued"
            )
    return CheckReport("unitary", "S_max is unitary", _params(t), N, budget, metrics, gates,
                       tol["unitary_block"], notes)


def check_lower_bound_expansive(t: SymbolTriple, N: int, budget: Optional[int] = None,
                                tolerances: Optional[dict] = None) -> CheckReport:
    """Smallest ||[g]|| / ||f|| over the graph at N and N + 10.

    ``budget`` applies at N; the second truncation uses its own default budget.
    """
    tol = _tols(tolerances)
    budget = _budget(N, budget)
    N2 = N + CONVERGENCE_STEP
    low = quotient_lower_bound(build_smax(t, N, budget))
    low_next = quotient_lower_bound(build_smax(t, N2, default_budget(N2)))
    drift = abs(low_next / low - 1.0) if low > 0 else math.inf
    metrics = {"lower_bound": low, "lower_bound_next": low_next, "drift": drift, "abs_A": abs(t.A)}
    gates = {"lower_bound": (">=", tol["lower_bound"]), "drift": ("<=", tol["lower_bound_drift"])}
    return CheckReport("lower_bound_expansive", "S_max is bounded below when |A| > 1",
                       _params(t), N, budget, metrics, gates, tol["lower_bound"])


def _psi_hat(t: SymbolTriple):
    """psi phi^m / phi_sym when it is entire, else None."""
    if t.m == 0:
        return t.psi
    if t.E == 0:
        return lambda z: t.psi(z) * (t.phi(z) / t.F) ** t.m
    if abs(t.A * t.F - t.B * t.E) <= 1e-12 * max(1.0, abs(t.A * t.F)):
        const = t.C * (t.A / t.E) ** t.m
        return lambda z: const * np.exp(t.D * z)
    return None


def check_boundedness(t: SymbolTriple, N: int, budget: Optional[int] = None, radius: float = 3.0,
                      grid: int = 61, tolerances: Optional[dict] = None) -> CheckReport:
    """Norm stability of the truncated relation from N to N + 10.

    The grid supremum of M(psi_hat, phi) and the sufficient-condition branch
    are reported alongside; neither is gated.
    """
    tol = _tols(tolerances)
    budget = _budget(N, budget)
    N2 = N + CONVERGENCE_STEP
    norm = relation_norm(build_smax(t, N, budget))
    norm_next = relation_norm(build_smax(t, N2, default_budget(N2)))
    cls = classify_bounded_domain_condition(t)
    metrics = {
        "norm": norm,
        "norm_next": norm_next,
        "norm_drift": abs(norm_next / norm - 1.0) if norm > 0 else 0.0,
        "branch": cls.canonical_params["branch"] if cls.positive else 0,
    }
    psi_hat = _psi_hat(t)
    metrics["psi_hat_entire"] = int(psi_hat is not None)
    notes = []
    if psi_hat is not None:
        metrics["sup_m_estimate"] = sup_m_estimate(psi_hat, t.phi, radius, grid)
    else:
        notes.append("psi_hat has poles: phi_sym and phi have different roots")
    if not cls.positive:
        notes.append(f"sufficient condition not met: {cls.witness}")
    gates = {"norm_drift": ("<=", tol["norm_drift"])}
    return CheckReport("boundedness", "S_max is bounded under the affine-symbol conditions",
                       _params(t), N, budget, metrics, gates, tol["norm_drift"], notes)


# ---------------------------------------------------------------- registry

NEEDS_CONJUGATION = {"adjoint", "c_selfadjoint"}

CHECKS = {
    "multivalued_part": check_multivalued_part,
    "domain_closure": check_domain_closure,
    "adjoint": check_adjoint_theorem,
    "c_selfadjoint": check_c_selfadjoint_theorem,
    "hermitian": check_hermitian_theorem,
    "unitary": check_unitary_theorem,
    "lower_bound_expansive": check_lower_bound_expansive,
    "boundedness": check_boundedness,
}


def run_check(name: str, t: SymbolTriple, N: int, budget: Optional[int] = None,
              p: Optional[ConjugationParams] = None, tolerances: Optional[dict] = None) -> CheckReport:
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}; available: {', '.join(CHECKS)}")
    fn = CHECKS[name]
    if name in NEEDS_CONJUGATION:
        if p is None:
            raise ValueError(f"check {name!r} needs a conjugation")
        return fn(t, p, N, budget, tolerances=tolerances)
    if name == "domain_closure":
        return fn(t, N, budget, p=p, tolerances=tolerances)
    return fn(t, N, budget, tolerances=tolerances)
