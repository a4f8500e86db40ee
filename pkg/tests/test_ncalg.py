"""Word algebra, rewriting, quotient bases, tensor reduction, ideal membership."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ncstar import ncalg as A
from ncstar import presentations as P
from ncstar.ncalg import (Certificate, Letter, Poly, TensorPoly,
                          build_quotient_basis, build_rewrite_system,
                          comultiply_generator, ideal_membership_bounded,
                          is_zero_tensor, replay_combination, replay_rewrite,
                          rewrite, word_str)
from ncstar.scalars import GaussianRational, I as IMAG, ONE

ZERO2 = [[0, 0], [0, 0]]
OFF2 = [[0, 1], [1, 0]]
ONES2 = [[1, 1], [1, 1]]

x1 = Poly.generator(Letter("x", 1, 0))
x2 = Poly.generator(Letter("x", 2, 0))


def u(i, j, s=False):
    return Poly.generator(Letter("u", i, j, s))


# ---------------------------------------------------------------------------
# free *-algebra operations
# ---------------------------------------------------------------------------

def test_star_reverses_and_toggles():
    p = x1 * x2.star()
    assert p.star() == x2 * x1.star()
    assert str(p.star()) == "x2.x1*"


def test_commutator_construction():
    rel = A.mul(x1, x2) + A.mul(x2.scale(GaussianRational(-1)), x1)
    assert rel == x1 * x2 - x2 * x1
    assert rel.degree() == 2


def test_star_antilinear():
    assert (x1.scale(IMAG)).star() == x1.star().scale(-IMAG)


@st.composite
def random_polys(draw, letters=None, max_degree=2, max_terms=4):
    if letters is None:
        letters = [Letter("x", i, 0, s) for i in (1, 2) for s in (False, True)]
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        deg = draw(st.integers(0, max_degree))
        w = tuple(draw(st.sampled_from(letters)) for _ in range(deg))
        c = GaussianRational(draw(st.integers(-3, 3)), draw(st.integers(-3, 3)),
                             draw(st.integers(1, 2)))
        if not c.is_zero():
            terms[w] = c
    return Poly(terms)


@given(random_polys(), random_polys())
@settings(max_examples=80, deadline=None)
def test_star_properties(p, q):
    assert p.star().star() == p
    assert (p + q).star() == p.star() + q.star()
    assert (p * q).star() == q.star() * p.star()


@given(random_polys(), random_polys(), random_polys())
@settings(max_examples=40, deadline=None)
def test_algebra_associativity(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


# ---------------------------------------------------------------------------
# comultiplication
# ---------------------------------------------------------------------------

def test_comultiply_generator_n2():
    t = comultiply_generator(1, 1, 2)
    expected = {
        ((Letter("u", 1, 1),), (Letter("u", 1, 1),)): ONE,
        ((Letter("u", 1, 2),), (Letter("u", 2, 1),)): ONE,
    }
    assert t.terms == expected


def test_comultiply_generator_n1():
    t = comultiply_generator(1, 1, 1)
    assert list(t.terms) == [((Letter("u", 1, 1),), (Letter("u", 1, 1),))]


def test_comultiply_out_of_range():
    with pytest.raises(ValueError):
        comultiply_generator(0, 1, 2)


def test_coproduct_of_degree_two_word_has_n_squared_terms():
    n = 3
    roster = tuple(Letter("u", i, j) for i in range(1, n + 1) for j in range(1, n + 1))
    images = {Letter("u", i, j): comultiply_generator(i, j, n)
              for i in range(1, n + 1) for j in range(1, n + 1)}
    p = u(1, 2, True) * u(2, 3)
    t = A.apply_tensor_hom(p, images, roster, roster)
    assert len(t.terms) == n * n
    # spot-check one term: u_1r* u_2p (x) u_r2* u_p3
    key = ((Letter("u", 1, 1, True), Letter("u", 2, 2)),
           (Letter("u", 1, 2, True), Letter("u", 2, 3)))
    assert key in t.terms


def test_tensor_star_is_legwise():
    t = TensorPoly.of(x1, x2.star())
    s = t.star()
    assert ((Letter("x", 1, 0, True),), (Letter("x", 2, 0),)) in s.terms


def test_tensor_roster_mismatch():
    ta = TensorPoly.of(x1, x1, left_roster=(Letter("x", 1, 0),), right_roster=(Letter("x", 1, 0),))
    tb = TensorPoly.of(x1, x1, left_roster=(Letter("x", 2, 0),), right_roster=(Letter("x", 1, 0),))
    with pytest.raises(A.RosterMismatch):
        ta + tb


# ---------------------------------------------------------------------------
# rewrite systems
# ---------------------------------------------------------------------------

def test_free_pair_has_no_rules():
    pres = P.unitary_qg_presentation(P.validate_pair(ZERO2, ZERO2))
    rs = build_rewrite_system(pres)
    assert rs.ordered_rules == ()
    assert len(rs.syzygies) == 16
    assert rs.canonical_column == 1


def test_mixed_pair_has_column_rules_at_k0_one():
    pres = P.unitary_qg_presentation(P.validate_pair(ZERO2, OFF2))
    rs = build_rewrite_system(pres)
    assert rs.canonical_column == 1
    kinds = {r.kind for r in rs.ordered_rules}
    assert "column-canon" in kinds and "row-canon" in kinds


def test_orthogonal_zero_rules():
    pres = P.orthogonal_qg_presentation(OFF2)
    rs = build_rewrite_system(pres)
    zero_patterns = {r.pattern for r in rs.ordered_rules if r.kind == "zero"}
    assert (Letter("ou", 1, 1), Letter("ou", 2, 1)) in zero_patterns


def test_rewrite_delta_sum_to_zero():
    pres = P.unitary_qg_presentation(P.validate_pair(ZERO2, OFF2))
    rs = build_rewrite_system(pres)
    p = u(1, 1, True) * u(1, 1) + u(1, 2, True) * u(1, 2) - Poly.one()
    red, trace = rewrite(p, rs)
    assert red.is_zero() and trace.completed


def test_rewrite_column_product_stays_canonical():
    # eta_12 = 1, eta_11 = 0, eta_22 = 1: k0 = 1 and no syzygy collapses X(1,2)
    pres = P.unitary_qg_presentation(P.validate_pair(ZERO2, [[0, 1], [1, 1]]))
    rs = build_rewrite_system(pres)
    assert rs.canonical_column == 1
    p = u(1, 1, True) * u(2, 1)
    red, trace = rewrite(p, rs)
    assert red == p
    assert [s for s in trace.steps if s["kind"] == "rule"] == []


def test_rewrite_star_first_canonicalization():
    pres = P.unitary_qg_presentation(P.validate_pair(ZERO2, [[0, 1], [1, 1]]))
    rs = build_rewrite_system(pres)
    p = u(2, 1) * u(1, 1, True)
    red, trace = rewrite(p, rs)
    assert red == u(1, 1, True) * u(2, 1)
    assert trace.steps[0]["kind"] == "rule"
    assert "column-canon" in trace.steps[0]["rule"]


def test_rewrite_collapses_vanishing_column_product():
    # for the fully mixed pair the conjugate-unitarity sum makes X(1,2) itself zero
    pres = P.unitary_qg_presentation(P.validate_pair(ZERO2, OFF2))
    rs = build_rewrite_system(pres)
    red, trace = rewrite(Poly.from_word((Letter("u", 1, 1, True), Letter("u", 2, 1))), rs)
    assert red.is_zero()
    assert any(s["kind"] == "syzygy" for s in trace.steps)


def test_rewrite_trace_replays_exactly():
    pres = P.unitary_qg_presentation(P.validate_pair(OFF2, ONES2))
    rs = build_rewrite_system(pres)
    p = u(2, 2) * u(1, 1) - u(1, 2, True) * u(2, 1) + u(1, 1, True) * u(1, 1)
    red, trace = rewrite(p, rs)
    assert replay_rewrite(p, rs, trace) == red


def test_rewrite_step_limit_flags_incomplete():
    pres = P.unitary_qg_presentation(P.validate_pair(OFF2, ONES2))
    rs = build_rewrite_system(pres)
    p = u(2, 2) * u(1, 1) * u(2, 1) * u(1, 2)
    red, trace = rewrite(p, rs, max_steps=1)
    assert not trace.completed


def test_rewrite_terminates_on_degree_four_words():
    import random
    rng = random.Random(7)
    presentations = [P.unitary_qg_presentation(p) for p in P.enumerate_pairs(2)]
    presentations += [P.unitary_qg_presentation(p) for p in P.enumerate_pairs(3)[::37]]
    presentations += [P.sphere_presentation(p) for p in P.enumerate_pairs(3)[5::61]]
    for pres in presentations:
        rs = build_rewrite_system(pres)
        letters = list(pres.generators) + [g.star() for g in pres.generators]
        for _ in range(8):
            w = tuple(rng.choice(letters) for _ in range(4))
            red, trace = rewrite(Poly.from_word(w), rs, max_steps=100_000)
            assert trace.completed, f"budget blown on {word_str(w)} over {pres.label}"


# ---------------------------------------------------------------------------
# quotient bases
# ---------------------------------------------------------------------------

def test_free_sphere_relation_span_rank_two():
    pres = P.sphere_presentation(P.validate_pair(ZERO2, ZERO2))
    qb = build_quotient_basis(pres, 2)
    assert qb.rank == 2
    assert len(qb.monomials) == 21  # 1 + 4 + 16


def test_classical_single_generator_reduce():
    pres = P.sphere_presentation(P.validate_pair([[0]], [[1]]))
    qb = build_quotient_basis(pres, 2)
    x = Poly.generator(Letter("x", 1, 0))
    assert qb.reduce(x.star() * x - Poly.one()).is_zero()


def test_unitary_free_syzygy_row_reduces():
    pres = P.unitary_qg_presentation(P.validate_pair(ZERO2, ZERO2))
    qb = build_quotient_basis(pres, 2)
    row = u(1, 1) * u(2, 1, True) + u(1, 2) * u(2, 2, True)  # delta_12 = 0
    assert qb.reduce(row).is_zero()


def _test_matrix_presentations():
    out = []
    for pair in P.enumerate_pairs(2):
        out.append(P.sphere_presentation(pair))
        out.append(P.unitary_qg_presentation(pair))
    for eps in (ZERO2, OFF2):
        out.append(P.orthogonal_qg_presentation(eps))
        out.append(P.tuple_space_presentation(eps))
    return out


def test_quotient_star_compatibility():
    for pres in _test_matrix_presentations():
        qb = build_quotient_basis(pres, 2)
        for rel in pres.all_relations():
            assert qb.reduce(rel.poly).is_zero()
            assert qb.reduce(rel.poly.star()).is_zero()


def test_rewrite_rule_soundness_against_linear_span():
    # every oriented rule's pattern-minus-image lies in the degree-2 relation span
    for pres in _test_matrix_presentations():
        rs = build_rewrite_system(pres)
        qb = build_quotient_basis(pres, 2)
        for rule in rs.ordered_rules:
            lhs = Poly.from_word(rule.pattern)
            rhs = Poly.zero() if rule.replacement is None else Poly.from_word(rule.replacement)
            assert qb.reduce(lhs - rhs).is_zero(), rule.rule_id


def test_dimension_cap():
    pres = P.unitary_qg_presentation(P.validate_pair(ZERO2, ZERO2))
    with pytest.raises(A.DimensionCap):
        build_quotient_basis(pres, 2, entry_cap=10)


def test_reduce_rejects_overweight_words():
    pres = P.sphere_presentation(P.validate_pair(ZERO2, ZERO2))
    qb = build_quotient_basis(pres, 2)
    with pytest.raises(ValueError):
        qb.reduce(x1 * x1 * x1)


# ---------------------------------------------------------------------------
# tensor certification
# ---------------------------------------------------------------------------

def test_zero_tensor_is_proved_zero():
    pres = P.unitary_qg_presentation(P.validate_pair(ZERO2, ZERO2))
    qb = build_quotient_basis(pres, 2)
    t = TensorPoly({}, left_roster=pres.generators, right_roster=pres.generators)
    assert is_zero_tensor(t, qb, qb).status == A.PROVED_ZERO


def test_free_generator_tensor_inconclusive():
    pres = P.unitary_qg_presentation(P.validate_pair(ZERO2, ZERO2))
    qb = build_quotient_basis(pres, 2)
    t = TensorPoly.of(u(1, 1), u(1, 1), left_roster=pres.generators, right_roster=pres.generators)
    cert = is_zero_tensor(t, qb, qb)
    assert cert.status == A.INCONCLUSIVE


def test_coproduct_images_of_starred_commutation_vanish_classical():
    pair = P.validate_pair(OFF2, ONES2)
    pres = P.unitary_qg_presentation(pair)
    qb = build_quotient_basis(pres, 2)
    images = {Letter("u", i, j): comultiply_generator(i, j, 2)
              for i in (1, 2) for j in (1, 2)}
    for i, j, k, l in itertools.product((1, 2), repeat=4):
        rel = u(i, k, True) * u(j, l) - u(j, l) * u(i, k, True)
        t = A.apply_tensor_hom(rel, images, pres.generators, pres.generators)
        assert is_zero_tensor(t, qb, qb).status == A.PROVED_ZERO


def test_tensor_roster_mismatch_against_basis():
    pres_u = P.unitary_qg_presentation(P.validate_pair(ZERO2, ZERO2))
    pres_s = P.sphere_presentation(P.validate_pair(ZERO2, ZERO2))
    qb_u = build_quotient_basis(pres_u, 2)
    qb_s = build_quotient_basis(pres_s, 2)
    t = TensorPoly.of(u(1, 1), u(1, 1), left_roster=pres_u.generators,
                      right_roster=pres_u.generators)
    with pytest.raises(A.RosterMismatch):
        is_zero_tensor(t, qb_u, qb_s)


# ---------------------------------------------------------------------------
# bounded ideal membership
# ---------------------------------------------------------------------------

def test_membership_trivial_for_relations():
    pres = P.unitary_qg_presentation(P.validate_pair(ZERO2, OFF2))
    for rel in pres.all_relations()[:6]:
        cert = ideal_membership_bounded(rel.poly, pres, 2)
        assert cert.status == A.PROVED_ZERO
        assert replay_combination(rel.poly, pres, cert.zero_evidence)


def test_membership_vanishing_column_product_sum():
    # u11.u21* + u12.u22* is the uu*-sum at (1,2), so it collapses to twice the
    # canonical column product and certifies as zero with the factor visible
    pair = P.validate_pair(ZERO2, OFF2)
    pres = P.unitary_qg_presentation(pair)
    p = u(1, 1) * u(2, 1, True) + u(1, 2) * u(2, 2, True)
    cert = ideal_membership_bounded(p, pres, 2)
    assert cert.status == A.PROVED_ZERO
    assert replay_combination(p, pres, cert.zero_evidence)


def test_membership_inconclusive_for_nonzero_product():
    pair = P.validate_pair(OFF2, ZERO2)
    pres = P.sphere_presentation(pair)
    p = x1 * x2.star()
    for bound in (2, 3, 4):
        cert = ideal_membership_bounded(p, pres, bound)
        assert cert.status == A.INCONCLUSIVE, f"bound {bound}"


def test_membership_degree_guard():
    pres = P.sphere_presentation(P.validate_pair(ZERO2, ZERO2))
    with pytest.raises(ValueError):
        ideal_membership_bounded(x1 * x1 * x1, pres, 2)


def test_oracle_agreement_sample():
    import random
    rng = random.Random(11)
    pair = P.validate_pair(ZERO2, OFF2)
    pres = P.unitary_qg_presentation(pair)
    rs = build_rewrite_system(pres)
    rels = pres.all_relations()
    letters = list(pres.generators) + [g.star() for g in pres.generators]
    for trial in range(60):
        if trial % 2 == 0:
            poly = Poly.zero()
            for _ in range(rng.randint(1, 3)):
                poly = poly + rng.choice(rels).poly.scale(GaussianRational(rng.randint(-2, 2)))
        else:
            terms = {tuple(rng.choice(letters) for _ in range(rng.randint(0, 2))):
                     GaussianRational(rng.randint(-2, 2)) for _ in range(rng.randint(1, 3))}
            poly = Poly(terms)
        red, trace = rewrite(poly, rs)
        cert = ideal_membership_bounded(poly, pres, 2, want_combination=False)
        if red.is_zero():
            assert cert.status == A.PROVED_ZERO
        if cert.status == A.PROVED_ZERO:
            assert red.is_zero()


def test_certificate_json_shape():
    pair = P.validate_pair(ZERO2, OFF2)
    pres = P.unitary_qg_presentation(pair)
    cert = ideal_membership_bounded(pres.all_relations()[0].poly, pres, 2)
    d = cert.to_json_dict()
    assert d["status"] == "ProvedZero"
    ev = d["zero_evidence"]
    assert ev["kind"] == "linear-combination"
    for term in ev["terms"]:
        assert set(term) == {"relation", "left", "right", "coefficient"}
        assert term["coefficient"].endswith("i")
