"""Finite-dimensional matrix models used as nonvanishing and independence witnesses.

A model assigns a complex matrix to every generator of a presentation; words
evaluate to matrix products and stars to conjugate transposes.  The hand-built
models keep an exact backing over Q(sqrt(2), i) so that residuals which vanish
mathematically are reported as exactly 0; seeded pseudo-random models live in
ordinary double precision.

A model may be a *probe*: it fails some presentation relations on purpose and
records those violations.  Probe models are barred from any claim that depends
on the relations they violate, but remain usable for the pure commutation and
independence computations they were written down for.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .ncalg import HERMITIAN_TAGS, Letter, Poly, word_str
from .presentations import (CommutationPair, Presentation,
                            orthogonal_qg_presentation, sphere_presentation,
                            tuple_space_presentation, validate_pair)
from .scalars import Q_ONE, Q_ZERO, QuadExact, Q_SQRT2_OVER_2, QuadExact as Q

__all__ = [
    "MatrixModel", "ResidualReport", "IndependenceResult",
    "probe_pair_model", "noninjectivity_sphere_model", "corrected_sphere_model",
    "torus_model", "free_unitary_model", "o2plus_model",
    "point_model_sphere", "point_model_tuple", "direct_sum",
    "model_residuals", "evaluate", "check_independence",
    "diagonal_sphere_model", "diagonal_unitary_model", "signed_point_model",
    "witness_models_for",
    "WitnessInvalid", "UnassignedGenerator", "PresentationMismatch",
    "DegenerateSamples", "ModelUnattainable",
]


class WitnessInvalid(RuntimeError):
    """The witness model violates relations its claim depends on."""


class UnassignedGenerator(KeyError):
    pass


class PresentationMismatch(ValueError):
    pass


class DegenerateSamples(ValueError):
    pass


class ModelUnattainable(RuntimeError):
    """No finite-dimensional model can satisfy the requested constraints."""


_EXACT_PHASES = {1: Q_ONE, -1: -Q_ONE, 1j: Q(0, 0, 1, 0), -1j: Q(0, 0, -1, 0)}


@dataclass(frozen=True)
class MatrixModel:
    """Assignment of dim x dim complex matrices to a presentation's generators."""

    presentation: Presentation
    dim: int
    assignment: dict  # Letter (unstarred) -> np.ndarray
    exact: Optional[dict] = None  # Letter -> tuple of tuples of QuadExact
    residual_tolerance: float = 1e-9
    label: str = ""
    probe: bool = False
    violations: tuple = ()
    seed_used: Optional[int] = None

    def matrix(self, letter: Letter) -> np.ndarray:
        base = letter.base()
        m = self.assignment.get(base)
        if m is None:
            raise UnassignedGenerator(f"model {self.label!r} assigns nothing to {word_str((base,))}")
        if letter.starred and letter.tag not in HERMITIAN_TAGS:
            return m.conj().T
        return m

    def to_json_dict(self) -> dict:
        def enc(m):
            return [[[repr(float(x.real)), repr(float(x.imag))] for x in row] for row in m]
        return {
            "label": self.label,
            "dim": self.dim,
            "probe": self.probe,
            "violations": list(self.violations),
            "presentation": self.presentation.label,
            "seed": self.seed_used,
            "assignment": {word_str((g,)): enc(self.assignment[g]) for g in sorted(self.assignment)},
        }


@dataclass(frozen=True)
class ResidualReport:
    per_relation: tuple  # ((description, residual), ...)
    max: float

    def worst(self):
        return max(self.per_relation, key=lambda kv: kv[1]) if self.per_relation else ("", 0.0)


@dataclass(frozen=True)
class IndependenceResult:
    rank: int
    expected: int
    singular_values: tuple
    threshold: float

    @property
    def independent(self) -> bool:
        return self.rank == self.expected


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _exact_matmul(a, b):
    n = len(a)
    k = len(b)
    m = len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = Q_ZERO
            for t in range(k):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return tuple(tuple(r) for r in out)


def _exact_star(a):
    n = len(a)
    return tuple(tuple(a[j][i].conjugate() for j in range(n)) for i in range(n))


def _exact_identity(dim):
    return tuple(tuple(Q_ONE if i == j else Q_ZERO for j in range(dim)) for i in range(dim))


def _exact_zero(dim):
    return tuple(tuple(Q_ZERO for _ in range(dim)) for _ in range(dim))


def _exact_to_complex(a) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in a], dtype=complex)


def evaluate(p: Poly, model: MatrixModel):
    """Evaluate a polynomial in the model; words become matrix products.

    Models with an exact backing are evaluated over Q(sqrt(2), i) and converted
    to a complex array afterwards, so values like 1/2 come out bit-exact.
    Returns (matrix, exact_matrix_or_None).
    """
    if model.exact is not None:
        acc = _exact_zero(model.dim)
        for w, c in p.items():
            term = _exact_identity(model.dim)
            for letter in w:
                m = model.exact.get(letter.base())
                if m is None:
                    raise UnassignedGenerator(f"model {model.label!r} assigns nothing to {word_str((letter.base(),))}")
                if letter.starred and letter.tag not in HERMITIAN_TAGS:
                    m = _exact_star(m)
                term = _exact_matmul(term, m)
            qc = QuadExact.from_gaussian(c)
            acc = tuple(tuple(acc[i][j] + qc * term[i][j] for j in range(model.dim)) for i in range(model.dim))
        return _exact_to_complex(acc), acc
    acc = np.zeros((model.dim, model.dim), dtype=complex)
    for w, c in p.items():
        term = np.eye(model.dim, dtype=complex)
        for letter in w:
            term = term @ model.matrix(letter)
        acc = acc + complex(c) * term
    return acc, None


def evaluate_matrix(p: Poly, model: MatrixModel) -> np.ndarray:
    return evaluate(p, model)[0]


def model_residuals(model: MatrixModel, presentation: Optional[Presentation] = None) -> ResidualReport:
    """Operator-norm residual of every relation (expanded sums included).

    Exactly-zero evaluations report 0.0 regardless of floating point.
    """
    pres = presentation or model.presentation
    rows = []
    worst = 0.0
    for rel in pres.all_relations():
        mat, exact = evaluate(rel.poly, model)
        if exact is not None and all(x.is_zero() for row in exact for x in row):
            res = 0.0
        else:
            res = float(np.linalg.norm(mat, 2))
        rows.append((rel.describe(), res))
        worst = max(worst, res)
    return ResidualReport(tuple(rows), worst)


def check_independence(family: Sequence[Poly], model: MatrixModel,
                       threshold: float = 1e-6, gate: object = "all") -> IndependenceResult:
    """Numerical rank of the flattened family via singular values.

    gate: "all" checks every presentation relation of the model first, "none"
    skips the soundness gate, and a list of Relations checks just those (used
    for probe models whose claims only rely on a relation subset).
    """
    if not family:
        raise ValueError("family must be nonempty")
    if gate != "none":
        if gate == "all":
            report = model_residuals(model)
        else:
            sub = Presentation(model.presentation.kind, model.presentation.generators,
                               tuple(gate), (), model.presentation.source_pair)
            report = model_residuals(model, sub)
        if report.max > model.residual_tolerance:
            desc, res = report.worst()
            raise WitnessInvalid(
                f"model {model.label!r} violates gated relation {desc!r} with residual {res:.3g}")
    rows = [evaluate_matrix(p, model).reshape(-1) for p in family]
    sv = np.linalg.svd(np.array(rows), compute_uv=False)
    rank = int((sv > threshold).sum())
    return IndependenceResult(rank, len(family), tuple(float(s) for s in sv), threshold)


# ---------------------------------------------------------------------------
# the hand-built models
# ---------------------------------------------------------------------------

def _finish_exact_model(pres, dim, exact_assignment, label, seed=None,
                        tolerance=1e-9) -> MatrixModel:
    assignment = {g: _exact_to_complex(m) for g, m in exact_assignment.items()}
    model = MatrixModel(pres, dim, assignment, exact_assignment,
                        residual_tolerance=tolerance, label=label, seed_used=seed)
    report = model_residuals(model)
    if report.max > tolerance:
        violations = tuple(desc for desc, r in report.per_relation if r > tolerance)
        model = replace(model, probe=True, violations=violations)
    return model


def _probe_pair_matrices():
    c = Q_SQRT2_OVER_2
    a = [[Q_ZERO] * 4 for _ in range(4)]
    b = [[Q_ZERO] * 4 for _ in range(4)]
    a[2][0] = Q_ONE          # e_31
    a[3][3] = c
    b[1][0] = Q_ONE          # e_21
    b[2][1] = Q_ONE          # e_32
    b[3][3] = c
    frz = lambda m: tuple(tuple(row) for row in m)
    return frz(a), frz(b)


def probe_pair_model() -> MatrixModel:
    """The explicit 4x4 probe pair: non-normal, commuting, with recorded violations.

    Both normalization sums evaluate to matrices of operator norm exactly 1,
    while the plain commutator holds exactly.  The model therefore stays in
    probe state and is only admitted for claims that rest on the commutation
    relations alone.
    """
    a, b = _probe_pair_matrices()
    pair = validate_pair([[0, 1], [1, 0]], [[0, 0], [0, 0]])
    pres = sphere_presentation(pair)
    exact = {Letter("x", 1, 0): a, Letter("x", 2, 0): b}
    return _finish_exact_model(pres, 4, exact, "probe-4x4")


def noninjectivity_sphere_model() -> MatrixModel:
    """Valid 4x4 witness for the sphere with eta_12 = 1 and free diagonal.

    Re-using the probe matrices with the second coordinate starred makes every
    relation of this sphere hold exactly, while x1 x2* evaluates to
    diag(0, 0, 0, 1/2).
    """
    a, b = _probe_pair_matrices()
    pair = validate_pair([[0, 0], [0, 0]], [[0, 1], [1, 0]])
    pres = sphere_presentation(pair)
    exact = {Letter("x", 1, 0): a, Letter("x", 2, 0): _exact_star(b)}
    return _finish_exact_model(pres, 4, exact, "noninjectivity-4x4")


def corrected_sphere_model() -> MatrixModel:
    """Requested repair of the probe pair; provably unattainable, so it raises.

    A finite-dimensional pair A, B with AB = BA and both normalization sums
    A*A + B*B = AA* + BB* = 1 is simultaneously unitarily triangularizable, and
    the two diagonal conditions force every strictly-upper column to vanish,
    so A and B are normal.  Commutation then transfers across stars, making
    AB* = B*A, and the four products {A*B, AB*, B*A, BA*} have rank at most 3.
    A model that is non-normal, satisfies all relations to 1e-9, and exhibits
    rank 4 therefore does not exist in any finite dimension; see
    scripts/search_corrected_model.py for the numerical search that maps the
    trade-off empirically.
    """
    raise ModelUnattainable(corrected_sphere_model.__doc__)


def torus_model(samples: Sequence = ((1, 1), (1, 1j)),
                pair: Optional[CommutationPair] = None) -> MatrixModel:
    """Diagonal two-coordinate model from phase samples: x_i = (sqrt2/2) diag(z_i).

    All entries commute and are normal, so every two-coordinate sphere relation
    holds; the sample set must separate the conjugate products or the model is
    rejected as degenerate.
    """
    samples = [tuple(s) for s in samples]
    if len(samples) < 2:
        raise DegenerateSamples("need at least 2 phase samples")
    for z1, z2 in samples:
        for z in (z1, z2):
            if abs(abs(complex(z)) - 1.0) > 1e-12:
                raise ValueError(f"phase {z} is not on the unit circle")
    if pair is None:
        pair = validate_pair([[0, 1], [1, 0]], [[1, 1], [1, 1]])
    pres = sphere_presentation(pair)
    dim = len(samples)
    exactable = all(z1 in _EXACT_PHASES and z2 in _EXACT_PHASES for z1, z2 in samples)
    if exactable:
        x1 = tuple(tuple(Q_SQRT2_OVER_2 * _EXACT_PHASES[samples[i][0]] if i == j else Q_ZERO
                         for j in range(dim)) for i in range(dim))
        x2 = tuple(tuple(Q_SQRT2_OVER_2 * _EXACT_PHASES[samples[i][1]] if i == j else Q_ZERO
                         for j in range(dim)) for i in range(dim))
        model = _finish_exact_model(pres, dim, {Letter("x", 1, 0): x1, Letter("x", 2, 0): x2},
                                    "torus-diagonal")
    else:
        half = complex(np.sqrt(0.5))
        x1 = np.diag([half * complex(z1) for z1, _ in samples])
        x2 = np.diag([half * complex(z2) for _, z2 in samples])
        model = MatrixModel(pres, dim, {Letter("x", 1, 0): x1, Letter("x", 2, 0): x2},
                            label="torus-diagonal")
    fam = [Poly.generator(Letter("x", 1, 0, True)) * Poly.generator(Letter("x", 2, 0)),
           Poly.generator(Letter("x", 1, 0)) * Poly.generator(Letter("x", 2, 0, True))]
    probe_rank = check_independence(fam, model, gate="none")
    if probe_rank.rank < 2:
        raise DegenerateSamples(
            f"samples {samples} only span rank {probe_rank.rank} on the conjugate products")
    return model


def free_unitary_model(dim: int = 4, seed: int = 0) -> MatrixModel:
    """Seeded pseudo-random unitaries scaled by sqrt2/2 as a free-sphere witness.

    In dimension 2 the four products are always dependent (the adjoint of a
    2x2 unitary is a polynomial of degree <= 1 in it), so dim >= 3 is required.
    Degenerate draws re-sample deterministically with an incremented seed, at
    most 16 times; the final seed is recorded on the model.
    """
    if dim < 3:
        raise ValueError("dim must be at least 3: the four products cannot be "
                         "independent in dimension 2")
    pair = validate_pair([[0, 0], [0, 0]], [[0, 0], [0, 0]])
    pres = sphere_presentation(pair)
    x1g, x2g = Letter("x", 1, 0), Letter("x", 2, 0)
    fam = [Poly.generator(x1g.star()) * Poly.generator(x2g),
           Poly.generator(x1g) * Poly.generator(x2g.star()),
           Poly.generator(x2g.star()) * Poly.generator(x1g),
           Poly.generator(x2g) * Poly.generator(x1g.star())]
    for attempt in range(16):
        s = seed + attempt
        rng = np.random.default_rng(s)
        us = []
        for _ in range(2):
            z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            q, r = np.linalg.qr(z)
            q = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
            us.append(q)
        half = complex(np.sqrt(0.5))
        model = MatrixModel(pres, dim,
                            {x1g: half * us[0], x2g: half * us[1]},
                            label=f"free-unitary-{dim}d", seed_used=s)
        if check_independence(fam, model, gate="none").rank == 4:
            return model
    raise DegenerateSamples("no independent draw within 16 seeded attempts")


def o2plus_model() -> MatrixModel:
    """Classical point plus anticommuting pair for the free orthogonal group at n=2.

    Summand (i) is the rotation-by-45-degrees point, summand (ii) the pair
    A = diag(c, -c), B = c(e12 + e21) with c = sqrt2/2, which squares to 1/2
    each and anticommutes.  All orthogonality relations hold exactly over the
    exact backing, and the two products v11 v21, v21 v11 stay independent.
    """
    pres = orthogonal_qg_presentation([[0, 0], [0, 0]])
    c = Q_SQRT2_OVER_2
    point = {
        Letter("ou", 1, 1): ((c,),),
        Letter("ou", 1, 2): ((c,),),
        Letter("ou", 2, 1): ((c,),),
        Letter("ou", 2, 2): ((-c,),),
    }
    A = ((c, Q_ZERO), (Q_ZERO, -c))
    B = ((Q_ZERO, c), (c, Q_ZERO))
    pauli = {
        Letter("ou", 1, 1): A,
        Letter("ou", 1, 2): B,
        Letter("ou", 2, 1): B,
        Letter("ou", 2, 2): A,
    }
    m1 = _finish_exact_model(pres, 1, point, "o2plus-point")
    m2 = _finish_exact_model(pres, 2, pauli, "o2plus-anticommuting")
    return replace(direct_sum([m1, m2]), label="o2plus-point-plus-anticommuting")


def point_model_sphere(k: int, n: int, phase=1,
                       pair: Optional[CommutationPair] = None) -> MatrixModel:
    """One-dimensional sphere point: x_k maps to the sample phase, others to 0."""
    if not (1 <= k <= n):
        raise ValueError(f"k={k} outside 1..{n}")
    if pair is None:
        pair = validate_pair([[0] * n for _ in range(n)], [[0] * n for _ in range(n)])
    pres = sphere_presentation(pair)
    if phase in _EXACT_PHASES:
        exact = {Letter("x", i, 0): ((_EXACT_PHASES[phase] if i == k else Q_ZERO,),)
                 for i in range(1, n + 1)}
        return _finish_exact_model(pres, 1, exact, f"sphere-point-{k}")
    assignment = {Letter("x", i, 0): np.array([[complex(phase) if i == k else 0j]])
                  for i in range(1, n + 1)}
    return MatrixModel(pres, 1, assignment, label=f"sphere-point-{k}")


def point_model_tuple(k: int, n: int, epsilon=None) -> MatrixModel:
    """One-dimensional tuple-space point: the identity character x_ij -> delta_ij.

    Evaluating column k picks out x_kk -> 1 and x_k'k -> 0 for k' != k; the
    remaining columns carry the same character so that every column sum holds
    exactly (a literal all-other-zero assignment would break them).
    """
    if not (1 <= k <= n):
        raise ValueError(f"k={k} outside 1..{n}")
    if epsilon is None:
        epsilon = [[0] * n for _ in range(n)]
    pres = tuple_space_presentation(epsilon)
    exact = {Letter("tx", i, j): ((Q_ONE if i == j else Q_ZERO,),)
             for i in range(1, n + 1) for j in range(1, n + 1)}
    return _finish_exact_model(pres, 1, exact, f"tuple-point-{k}")


def direct_sum(models: Sequence[MatrixModel]) -> MatrixModel:
    """Block-diagonal sum; any relation's residual is the max over the parts."""
    if not models:
        raise ValueError("need at least one model")
    first = models[0]
    for m in models[1:]:
        if m.presentation.label != first.presentation.label:
            raise PresentationMismatch(
                f"cannot sum models of {m.presentation.label} and {first.presentation.label}")
    dim = sum(m.dim for m in models)
    gens = first.presentation.generators
    assignment = {}
    for g in gens:
        blocks = []
        for m in models:
            if g not in m.assignment:
                raise UnassignedGenerator(f"model {m.label!r} assigns nothing to {word_str((g,))}")
            blocks.append(m.assignment[g])
        out = np.zeros((dim, dim), dtype=complex)
        pos = 0
        for b in blocks:
            out[pos:pos + b.shape[0], pos:pos + b.shape[0]] = b
            pos += b.shape[0]
        assignment[g] = out
    exact = None
    if all(m.exact is not None for m in models):
        exact = {}
        for g in gens:
            rows = []
            pos = 0
            for m in models:
                for r, row in enumerate(m.exact[g]):
                    rows.append(tuple([Q_ZERO] * pos + list(row) + [Q_ZERO] * (dim - pos - m.dim)))
                pos += m.dim
            exact[g] = tuple(rows)
    merged = MatrixModel(first.presentation, dim, assignment, exact,
                         residual_tolerance=first.residual_tolerance,
                         label="(+)".join(m.label for m in models))
    report = model_residuals(merged)
    if report.max > merged.residual_tolerance:
        merged = replace(merged, probe=True,
                         violations=tuple(d for d, r in report.per_relation
                                          if r > merged.residual_tolerance))
    return merged


# ---------------------------------------------------------------------------
# cross-validation witnesses for arbitrary presentations
# ---------------------------------------------------------------------------

def diagonal_sphere_model(pair: CommutationPair, seed: int = 0, dim: int = 2) -> MatrixModel:
    """Commuting normal diagonal model, valid for every sphere presentation."""
    n = pair.n
    rng = np.random.default_rng(seed)
    pres = sphere_presentation(pair)
    scale = 1.0 / np.sqrt(n)
    assignment = {}
    for i in range(1, n + 1):
        phases = np.exp(2j * np.pi * rng.random(dim))
        assignment[Letter("x", i, 0)] = scale * np.diag(phases)
    return MatrixModel(pres, dim, assignment, label=f"sphere-diagonal-{n}", seed_used=seed)


def diagonal_unitary_model(pair: CommutationPair, seed: int = 0, dim: int = 2) -> MatrixModel:
    """Diagonal-phase model u_ij = delta_ij z_i, valid for every unitary presentation."""
    from .presentations import unitary_qg_presentation
    n = pair.n
    rng = np.random.default_rng(seed)
    pres = unitary_qg_presentation(pair)
    phases = np.exp(2j * np.pi * rng.random((n, dim)))
    assignment = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                assignment[Letter("u", i, j)] = np.diag(phases[i - 1])
            else:
                assignment[Letter("u", i, j)] = np.zeros((dim, dim), dtype=complex)
    return MatrixModel(pres, dim, assignment, label=f"unitary-diagonal-{n}", seed_used=seed)


def signed_point_model(pres: Presentation, seed: int = 0) -> MatrixModel:
    """Signed identity character for orthogonal-qg or tuple-space presentations."""
    n = pres.source_pair.n
    rng = np.random.default_rng(seed)
    signs = rng.choice([Q_ONE, -Q_ONE], size=n)
    tag = "ou" if pres.kind == "orthogonal-qg" else "tx"
    exact = {Letter(tag, i, j): ((signs[i - 1] if i == j else Q_ZERO,),)
             for i in range(1, n + 1) for j in range(1, n + 1)}
    return _finish_exact_model(pres, 1, exact, f"{pres.kind}-signed-point", seed=seed)


def witness_models_for(pres: Presentation, seed: int = 0) -> list:
    """Valid witness models available for cross-checking ProvedZero claims."""
    pair = pres.source_pair
    if pres.kind == "complex-sphere":
        models = [diagonal_sphere_model(pair, seed)]
        models += [point_model_sphere(k, pair.n, pair=pair) for k in range(1, pair.n + 1)]
        return models
    if pres.kind == "unitary-qg":
        return [diagonal_unitary_model(pair, seed), diagonal_unitary_model(pair, seed + 1)]
    if pres.kind in ("orthogonal-qg", "tuple-space"):
        models = [signed_point_model(pres, seed), signed_point_model(pres, seed + 1)]
        if pres.kind == "orthogonal-qg" and pair.n == 2 and all(x == 0 for row in pair.epsilon for x in row):
            models.append(o2plus_model())
        return models
    raise ValueError(f"unknown presentation kind {pres.kind!r}")
