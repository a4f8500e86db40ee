"""Commutation-pair data and the four presentation families built from it.

A pair of symmetric 0/1 matrices (epsilon, eta) prescribes which coordinates
commute plainly (epsilon) and which commute against stars (eta, whose diagonal
encodes normality).  This module validates pairs, checks and enforces the two
regularity conventions, and constructs the presentations of

* the noncommutative complex sphere on n coordinates,
* the partial-commutation quantum unitary group on n^2 entries,
* the partial-commutation quantum orthogonal group (self-adjoint entries), and
* the quantum space of sphere tuples it acts on.

All values are immutable; every operation here is a pure function.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .ncalg import Letter, Poly, poly_str, word_str
from .scalars import GaussianRational, MINUS_ONE, ONE


class PairValidationError(ValueError):
    """Base class for commutation-pair validation failures."""


class SizeMismatch(PairValidationError):
    pass


class NotSymmetric(PairValidationError):
    pass


class BadDiagonal(PairValidationError):
    pass


class BadEntry(PairValidationError):
    pass


class EmptySubset(ValueError):
    pass


class IndexOutOfRange(ValueError):
    pass


class DuplicateIndex(ValueError):
    pass


class TooLarge(ValueError):
    pass


Matrix = tuple  # tuple[tuple[int, ...], ...]


def _freeze(m) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in m)


@dataclass(frozen=True)
class CommutationPair:
    """Validated (epsilon, eta) data: symmetric 0/1 matrices, epsilon zero-diagonal."""

    n: int
    epsilon: Matrix
    eta: Matrix

    def compact(self) -> str:
        e = "/".join("".join(str(x) for x in row) for row in self.epsilon)
        h = "/".join("".join(str(x) for x in row) for row in self.eta)
        return f"eps={e};eta={h}"

    def to_json_dict(self) -> dict:
        return {"n": self.n, "epsilon": [list(r) for r in self.epsilon],
                "eta": [list(r) for r in self.eta]}

    def flat(self) -> tuple:
        return tuple(x for row in self.epsilon for x in row) + tuple(x for row in self.eta for x in row)


def validate_pair(epsilon, eta) -> CommutationPair:
    """Validate raw matrices; the raised error names the offending index."""
    eps = _freeze(epsilon)
    et = _freeze(eta)
    n = len(eps)
    if n < 1:
        raise SizeMismatch("epsilon must be a nonempty square matrix")
    for name, m in (("epsilon", eps), ("eta", et)):
        if len(m) != n:
            raise SizeMismatch(f"{name} has {len(m)} rows, expected {n}")
        for i, row in enumerate(m, start=1):
            if len(row) != n:
                raise SizeMismatch(f"{name} row {i} has length {len(row)}, expected {n}")
            for j, x in enumerate(row, start=1):
                if x not in (0, 1):
                    raise BadEntry(f"{name}[{i},{j}] = {x} is not in {{0, 1}}")
    for name, m in (("epsilon", eps), ("eta", et)):
        for i in range(n):
            for j in range(i + 1, n):
                if m[i][j] != m[j][i]:
                    raise NotSymmetric(f"{name} is not symmetric at ({i + 1},{j + 1})/({j + 1},{i + 1})")
    for i in range(n):
        if eps[i][i] != 0:
            raise BadDiagonal(f"epsilon[{i + 1},{i + 1}] must be 0")
    return CommutationPair(n, eps, et)


@dataclass(frozen=True)
class RegularityReport:
    is_regular: bool
    violations_convention_A: tuple  # pairs (i, j), 1-based, i < j
    violations_convention_B: tuple  # indices i, 1-based


def is_regular(pair: CommutationPair) -> RegularityReport:
    """Check the two regularity conventions.

    Convention A: eps_ij must equal eta_ij whenever x_i or x_j is normal.
    Convention B: every non-normal x_i needs a non-normal partner x_j that it
    does not both plainly and star-commute with.
    """
    n, eps, eta = pair.n, pair.epsilon, pair.eta
    bad_a = []
    for i in range(n):
        for j in range(i + 1, n):
            if (eta[i][i] == 1 or eta[j][j] == 1) and eps[i][j] != eta[i][j]:
                bad_a.append((i + 1, j + 1))
    bad_b = []
    for i in range(n):
        if eta[i][i] == 1:
            continue
        ok = any(
            j != i and eta[j][j] == 0 and (eps[i][j] == 0 or eta[i][j] == 0)
            for j in range(n)
        )
        if not ok:
            bad_b.append(i + 1)
    return RegularityReport(not bad_a and not bad_b, tuple(bad_a), tuple(bad_b))


def regularize(pair: CommutationPair) -> CommutationPair:
    """Least fixpoint of the two normality-propagation rules.

    R1: if every non-normal partner of a non-normal x_i both plainly and
    star-commutes with it (vacuously if there is none), x_i is forced normal.
    R2: once x_i or x_j is normal, the two commutation notions for (i, j)
    coincide, so both entries merge to their maximum.

    Both rules only ever raise entries, so the iteration is a monotone closure;
    the output is regular and a regular input is returned unchanged.
    """
    n = pair.n
    eps = [list(row) for row in pair.epsilon]
    eta = [list(row) for row in pair.eta]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if eta[i][i] == 0:
                if all(
                    eps[i][j] == 1 and eta[i][j] == 1
                    for j in range(n)
                    if j != i and eta[j][j] == 0
                ):
                    eta[i][i] = 1
                    changed = True
        for i in range(n):
            for j in range(n):
                if i != j and (eta[i][i] == 1 or eta[j][j] == 1):
                    m = max(eps[i][j], eta[i][j])
                    if eps[i][j] != m or eta[i][j] != m:
                        eps[i][j] = eps[j][i] = m
                        eta[i][j] = eta[j][i] = m
                        changed = True
    return CommutationPair(n, _freeze(eps), _freeze(eta))


# ---------------------------------------------------------------------------
# presentations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Relation:
    """One relation polynomial asserted equal to zero."""

    rid: str
    poly: Poly
    description: str = ""

    def describe(self) -> str:
        return self.description or f"{poly_str(self.poly)} = 0"


@dataclass(frozen=True)
class SumFamily:
    """A delta-sum schema, e.g. for each (i,j): sum_k u_ik* u_jk - delta_ij."""

    label: str
    members: tuple  # tuple[Relation, ...]


@dataclass(frozen=True)
class Presentation:
    kind: str  # complex-sphere | unitary-qg | orthogonal-qg | tuple-space
    generators: tuple  # tuple[Letter, ...], unstarred
    relations: tuple  # tuple[Relation, ...]
    sum_families: tuple  # tuple[SumFamily, ...]
    source_pair: CommutationPair

    def all_relations(self) -> tuple:
        return self.relations + tuple(m for fam in self.sum_families for m in fam.members)

    @property
    def label(self) -> str:
        return f"{self.kind}[n={self.source_pair.n};{self.source_pair.compact()}]"

    def generator_set(self) -> frozenset:
        return frozenset(self.generators)


def _canonical_poly_key(poly: Poly):
    lead = max(poly.terms, key=lambda w: (len(w), w))
    inv = ONE / poly.terms[lead]
    return frozenset((w, (c * inv).exact_str()) for w, c in poly.items())


class _RelationBuilder:
    def __init__(self):
        self.relations = []
        self._seen = set()

    def add(self, rid: str, poly: Poly, description: str = ""):
        if poly.is_zero():
            return
        key = _canonical_poly_key(poly)
        if key in self._seen:
            return
        self._seen.add(key)
        self.relations.append(Relation(rid, poly, description or f"{poly_str(poly)} = 0"))


def _gen(tag: str, i: int, j: int = 0) -> Poly:
    return Poly.generator(Letter(tag, i, j))


def sphere_presentation(pair: CommutationPair) -> Presentation:
    """The noncommutative complex sphere on x_1..x_n for this pair."""
    n, eps, eta = pair.n, pair.epsilon, pair.eta
    gens = tuple(Letter("x", i, 0) for i in range(1, n + 1))
    rb = _RelationBuilder()
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if eps[i - 1][j - 1]:
                rb.add(f"eps({i},{j})", _gen("x", i) * _gen("x", j) - _gen("x", j) * _gen("x", i))
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            if eta[i - 1][j - 1]:
                xi_star = Poly.generator(Letter("x", i, 0, True))
                rb.add(f"eta({i},{j})", xi_star * _gen("x", j) - _gen("x", j) * xi_star)
    star_sum = Poly.zero()
    plain_sum = Poly.zero()
    for i in range(1, n + 1):
        xi = Letter("x", i, 0)
        star_sum = star_sum + Poly.generator(xi.star()) * Poly.generator(xi)
        plain_sum = plain_sum + Poly.generator(xi) * Poly.generator(xi.star())
    fams = (
        SumFamily("sum:x*x", (Relation("sum:x*x", star_sum - Poly.one(), "Σ x_i* x_i = 1"),)),
        SumFamily("sum:xx*", (Relation("sum:xx*", plain_sum - Poly.one(), "Σ x_i x_i* = 1"),)),
    )
    return Presentation("complex-sphere", gens, tuple(rb.relations), fams, pair)


def _delta_sum_family(label: str, n: int, word_maker) -> SumFamily:
    members = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            total = Poly.zero()
            for k in range(1, n + 1):
                total = total + word_maker(i, j, k)
            if i == j:
                total = total - Poly.one()
            members.append(Relation(f"{label}({i},{j})", total,
                                    f"{label} entry ({i},{j})"))
    return SumFamily(label, tuple(members))


def unitary_qg_presentation(pair: CommutationPair) -> Presentation:
    """The partial-commutation quantum unitary group on n^2 entries u_ij."""
    n, eps, eta = pair.n, pair.epsilon, pair.eta
    gens = tuple(Letter("u", i, j) for i in range(1, n + 1) for j in range(1, n + 1))
    rb = _RelationBuilder()

    def u(i, j, s=False):
        return Poly.generator(Letter("u", i, j, s))

    idx = range(1, n + 1)
    # plain exchange family: three epsilon-conditioned cases
    for i in idx:
        for j in idx:
            for k in idx:
                for l in idx:
                    ei, ek = eps[i - 1][j - 1], eps[k - 1][l - 1]
                    if ei and ek:
                        rb.add(f"Reps-comm({i},{j};{k},{l})", u(i, k) * u(j, l) - u(j, l) * u(i, k))
                    elif ei and not ek:
                        rb.add(f"Reps-xrow({i},{j};{k},{l})", u(i, k) * u(j, l) - u(j, k) * u(i, l))
                    elif ek and not ei:
                        rb.add(f"Reps-xcol({i},{j};{k},{l})", u(i, k) * u(j, l) - u(i, l) * u(j, k))
    # starred commutation family
    for i in idx:
        for j in idx:
            for k in idx:
                for l in idx:
                    hi, hk = eta[i - 1][j - 1], eta[k - 1][l - 1]
                    if hi and hk:
                        rb.add(f"Reta-comm({i},{j};{k},{l})",
                               u(i, k, True) * u(j, l) - u(j, l) * u(i, k, True))
                    elif hi and not hk and k != l:
                        rb.add(f"Reta-zero({i},{j};{k},{l}):su", u(i, k, True) * u(j, l))
                        rb.add(f"Reta-zero({i},{j};{k},{l}):us", u(i, k) * u(j, l, True))
                    elif hk and not hi and i != j:
                        rb.add(f"Reta-zero({i},{j};{k},{l}):su", u(i, k, True) * u(j, l))
                        rb.add(f"Reta-zero({i},{j};{k},{l}):us", u(i, k) * u(j, l, True))
    # fourfold equalities: column products u_ik* u_jk and row products u_ki* u_kj
    free = [k for k in idx if eta[k - 1][k - 1] == 0]
    if free:
        k0 = free[0]
        for i in idx:
            for j in idx:
                if not eta[i - 1][j - 1]:
                    continue
                for k in free:
                    rb.add(f"colprod-swap({i},{j};{k})",
                           u(i, k, True) * u(j, k) - u(j, k) * u(i, k, True))
                    rb.add(f"rowprod-swap({i},{j};{k})",
                           u(k, i, True) * u(k, j) - u(k, j) * u(k, i, True))
                    if k != k0:
                        rb.add(f"colprod-tie({i},{j};{k})",
                               u(i, k, True) * u(j, k) - u(i, k0, True) * u(j, k0))
                        rb.add(f"rowprod-tie({i},{j};{k})",
                               u(k, i, True) * u(k, j) - u(k0, i, True) * u(k0, j))
    fams = (
        _delta_sum_family("sum:u*u", n, lambda i, j, k: u(k, i, True) * u(k, j)),
        _delta_sum_family("sum:uu*", n, lambda i, j, k: u(i, k) * u(j, k, True)),
        _delta_sum_family("sum:conj(u)conj(u)*", n, lambda i, j, k: u(i, k, True) * u(j, k)),
        _delta_sum_family("sum:conj(u)*conj(u)", n, lambda i, j, k: u(k, i) * u(k, j, True)),
    )
    return Presentation("unitary-qg", gens, tuple(rb.relations), fams, pair)


def _validate_epsilon(epsilon) -> CommutationPair:
    eps = _freeze(epsilon)
    n = len(eps)
    zeros = tuple(tuple(0 for _ in range(n)) for _ in range(n))
    return validate_pair(eps, zeros)


def orthogonal_qg_presentation(epsilon) -> Presentation:
    """The partial-commutation quantum orthogonal group (self-adjoint entries)."""
    pair = _validate_epsilon(epsilon)
    n, eps = pair.n, pair.epsilon
    gens = tuple(Letter("ou", i, j) for i in range(1, n + 1) for j in range(1, n + 1))
    rb = _RelationBuilder()

    def v(i, j):
        return Poly.generator(Letter("ou", i, j))

    idx = range(1, n + 1)
    for i in idx:
        for j in idx:
            for k in idx:
                for l in idx:
                    ei, ek = eps[i - 1][j - 1], eps[k - 1][l - 1]
                    if ei and ek:
                        rb.add(f"Ro-comm({i},{j};{k},{l})", v(i, k) * v(j, l) - v(j, l) * v(i, k))
                    elif ei or ek:
                        rb.add(f"Ro-zero({i},{j};{k},{l})", v(i, k) * v(j, l))
    fams = (
        _delta_sum_family("sum:row-orth", n, lambda i, j, k: v(i, k) * v(j, k)),
        _delta_sum_family("sum:col-orth", n, lambda i, j, k: v(k, i) * v(k, j)),
    )
    return Presentation("orthogonal-qg", gens, tuple(rb.relations), fams, pair)


def tuple_space_presentation(epsilon) -> Presentation:
    """The quantum space of n sphere columns with epsilon-conditioned mixing."""
    pair = _validate_epsilon(epsilon)
    n, eps = pair.n, pair.epsilon
    gens = tuple(Letter("tx", i, j) for i in range(1, n + 1) for j in range(1, n + 1))
    rb = _RelationBuilder()

    def x(i, j):
        return Poly.generator(Letter("tx", i, j))

    idx = range(1, n + 1)
    for i in idx:
        for j in idx:
            for k in idx:
                for l in idx:
                    ei, ek = eps[i - 1][j - 1], eps[k - 1][l - 1]
                    if ei and ek:
                        rb.add(f"Rt-comm({i},{j};{k},{l})", x(i, k) * x(j, l) - x(j, l) * x(i, k))
                    elif ei or ek:
                        rb.add(f"Rt-zero({i},{j};{k},{l})", x(i, k) * x(j, l))
    col = []
    for k in idx:
        for l in idx:
            total = Poly.zero()
            for i in idx:
                total = total + x(i, k) * x(i, l)
            if k == l:
                total = total - Poly.one()
            col.append(Relation(f"sum:col-orth({k},{l})", total, f"column orthonormality ({k},{l})"))
    fams = (SumFamily("sum:col-orth", tuple(col)),)
    return Presentation("tuple-space", gens, tuple(rb.relations), fams, pair)


@dataclass(frozen=True)
class RestrictedSphere:
    """A sphere presentation on a coordinate subset plus the generator mapping.

    generator_map sends each original generator to its new position or to None
    for coordinates that are killed.
    """

    presentation: Presentation
    pair: CommutationPair
    generator_map: dict


def restrict_presentation(pres: Presentation, keep: Sequence[int]) -> RestrictedSphere:
    if pres.kind != "complex-sphere":
        raise ValueError("restriction is defined for sphere presentations")
    keep = list(keep)
    if not keep:
        raise EmptySubset("keep must name at least one coordinate")
    n = pres.source_pair.n
    for i in keep:
        if not (1 <= i <= n):
            raise IndexOutOfRange(f"index {i} outside 1..{n}")
    if len(set(keep)) != len(keep):
        raise DuplicateIndex(f"repeated index in {keep}")
    eps = tuple(tuple(pres.source_pair.epsilon[a - 1][b - 1] for b in keep) for a in keep)
    eta = tuple(tuple(pres.source_pair.eta[a - 1][b - 1] for b in keep) for a in keep)
    sub = validate_pair(eps, eta)
    mapping = {}
    for i in range(1, n + 1):
        old = Letter("x", i, 0)
        if i in keep:
            mapping[old] = Letter("x", keep.index(i) + 1, 0)
        else:
            mapping[old] = None
    return RestrictedSphere(sphere_presentation(sub), sub, mapping)


def enumerate_pairs(n: int, regular_only: bool = False, cap: int = 100_000) -> list:
    """All valid pairs of size n in lexicographic order of flattened entries."""
    if n < 1:
        raise ValueError("n must be positive")
    count = 2 ** (n * n)
    if count > cap:
        raise TooLarge(f"{count} candidate pairs exceed the cap of {cap} (n={n})")
    off = [(i, j) for i in range(n) for j in range(i + 1, n)]
    diag = list(range(n))
    pairs = []
    for eps_bits in itertools.product((0, 1), repeat=len(off)):
        eps = [[0] * n for _ in range(n)]
        for (i, j), b in zip(off, eps_bits):
            eps[i][j] = eps[j][i] = b
        for eta_off in itertools.product((0, 1), repeat=len(off)):
            for eta_diag in itertools.product((0, 1), repeat=n):
                eta = [[0] * n for _ in range(n)]
                for (i, j), b in zip(off, eta_off):
                    eta[i][j] = eta[j][i] = b
                for i, b in zip(diag, eta_diag):
                    eta[i][i] = b
                pairs.append(CommutationPair(n, _freeze(eps), _freeze(eta)))
    pairs.sort(key=lambda p: p.flat())
    if regular_only:
        pairs = [p for p in pairs if is_regular(p).is_regular]
    return pairs


# ---------------------------------------------------------------------------
# pair files
# ---------------------------------------------------------------------------

def pair_from_json_dict(data: dict) -> CommutationPair:
    if "epsilon" not in data:
        raise PairValidationError("pair file is missing the 'epsilon' matrix")
    eps = data["epsilon"]
    n = data.get("n", len(eps))
    if n != len(eps):
        raise SizeMismatch(f"declared n={n} but epsilon has {len(eps)} rows")
    eta = data.get("eta")
    if eta is None:
        eta = [[0] * n for _ in range(n)]
    return validate_pair(eps, eta)


def load_pair(path) -> CommutationPair:
    with open(path, "r", encoding="utf-8") as fh:
        return pair_from_json_dict(json.load(fh))


def save_pair(pair: CommutationPair, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(pair.to_json_dict(), fh, indent=2)
        fh.write("\n")
