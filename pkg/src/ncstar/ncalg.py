"""Exact noncommutative *-polynomial engine.

Words are tuples of star-decorated letters; polynomials map words to exact
Gaussian-rational coefficients.  On top of the free *-algebra the module
provides:

* oriented degree-2 rewriting with delta-sum (syzygy) linear passes and a
  replayable trace,
* degree-bounded quotient certification by exact sparse Gaussian elimination,
* two-leg tensor polynomials with leg-wise reduction, and
* degree-bounded two-sided ideal membership with an explicit linear
  combination as evidence.

Everything here is pure and exact; no floating point enters this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import NamedTuple, Optional, Sequence

from .scalars import GaussianRational, MINUS_ONE, ONE, ZERO, parse_scalar, scalar

__all__ = [
    "Letter", "Word", "Poly", "TensorPoly", "Rule", "RewriteSystem",
    "RewriteTrace", "QuotientBasis", "Certificate",
    "mul", "add", "star", "comultiply_generator", "apply_tensor_hom",
    "build_rewrite_system", "rewrite", "replay_rewrite",
    "build_quotient_basis", "is_zero_tensor", "ideal_membership_bounded",
    "replay_combination", "word_str", "poly_str",
    "RosterMismatch", "DimensionCap",
]

# Letter tags whose generators are self-adjoint; star() leaves them unstarred.
HERMITIAN_TAGS = frozenset({"ou", "tx"})

# Display names for tags (the orthogonal family prints as u, the tuple family as x).
_TAG_DISPLAY = {"x": "x", "u": "u", "ou": "u", "tx": "x"}


class RosterMismatch(ValueError):
    """Operands were built over different generator rosters."""


class DimensionCap(RuntimeError):
    """A bounded linear-algebra construction exceeded its configured size cap."""


class Letter(NamedTuple):
    """One star-decorated generator occurrence.

    Sorting a Letter compares (tag, row, col, starred), which is exactly the
    letter order the rewrite rules are oriented by: unstarred < starred and
    single-index generators carry col = 0.
    """

    tag: str
    row: int
    col: int
    starred: bool = False

    def star(self) -> "Letter":
        if self.tag in HERMITIAN_TAGS:
            return self
        return Letter(self.tag, self.row, self.col, not self.starred)

    def base(self) -> "Letter":
        """The unstarred generator this letter decorates."""
        if self.starred:
            return Letter(self.tag, self.row, self.col, False)
        return self


Word = tuple  # tuple[Letter, ...]; the empty tuple is the unit 1


def letter_str(l: Letter) -> str:
    name = _TAG_DISPLAY.get(l.tag, l.tag)
    if l.col == 0:
        body = f"{name}{l.row}" if l.row < 10 else f"{name}[{l.row}]"
    elif l.row < 10 and l.col < 10:
        body = f"{name}{l.row}{l.col}"
    else:
        body = f"{name}[{l.row},{l.col}]"
    return body + ("*" if l.starred else "")


def word_str(w: Word) -> str:
    if not w:
        return "1"
    return ".".join(letter_str(l) for l in w)


def word_key(w: Word):
    """Length-lexicographic sort key induced by the letter order."""
    return (len(w), w)


def star_word(w: Word) -> Word:
    return tuple(l.star() for l in reversed(w))


def words_up_to(letters: Sequence[Letter], bound: int) -> list:
    """All words of degree <= bound over the given letters, ascending order."""
    out = [()]
    layer = [()]
    for _ in range(bound):
        layer = [w + (l,) for w in layer for l in letters]
        out.extend(layer)
    out.sort(key=word_key)
    return out


class Poly:
    """Finite map Word -> GaussianRational with no zero coefficients stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict] = None):
        if terms:
            self.terms = {w: c for w, c in terms.items() if not c.is_zero()}
        else:
            self.terms = {}

    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    @classmethod
    def one(cls) -> "Poly":
        return cls({(): ONE})

    @classmethod
    def constant(cls, c) -> "Poly":
        return cls({(): scalar(c)})

    @classmethod
    def from_word(cls, w: Word, c=ONE) -> "Poly":
        return cls({tuple(w): scalar(c)})

    @classmethod
    def generator(cls, l: Letter) -> "Poly":
        return cls({(l,): ONE})

    def items(self):
        return self.terms.items()

    def words(self):
        return self.terms.keys()

    def coefficient(self, w: Word) -> GaussianRational:
        return self.terms.get(tuple(w), ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            cur = out.get(w)
            s = c if cur is None else cur + c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
        p = Poly.__new__(Poly)
        p.terms = out
        return p

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        p = Poly.__new__(Poly)
        p.terms = {w: -c for w, c in self.terms.items()}
        return p

    def scale(self, c) -> "Poly":
        c = scalar(c)
        if c.is_zero():
            return Poly.zero()
        p = Poly.__new__(Poly)
        p.terms = {w: v * c for w, v in self.terms.items()}
        return p

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, GaussianRational)):
            return self.scale(other)
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                cur = out.get(w)
                s = c if cur is None else cur + c
                if s.is_zero():
                    out.pop(w, None)
                else:
                    out[w] = s
        p = Poly.__new__(Poly)
        p.terms = out
        return p

    def __rmul__(self, other) -> "Poly":
        if isinstance(other, (int, GaussianRational)):
            return self.scale(other)
        return NotImplemented

    def star(self) -> "Poly":
        p = Poly.__new__(Poly)
        p.terms = {star_word(w): c.conjugate() for w, c in self.terms.items()}
        return p

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        return f"Poly({poly_str(self)})"

    def __str__(self) -> str:
        return poly_str(self)


def poly_str(p: Poly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for w in sorted(p.terms, key=word_key, reverse=True):
        c = p.terms[w]
        cs = str(c)
        if not w:
            parts.append(cs)
        elif cs == "1":
            parts.append(word_str(w))
        elif cs == "-1":
            parts.append(f"-{word_str(w)}")
        else:
            parts.append(f"{cs}·{word_str(w)}")
    out = parts[0]
    for part in parts[1:]:
        out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return out


def mul(p: Poly, q: Poly) -> Poly:
    return p * q


def add(p: Poly, q: Poly) -> Poly:
    return p + q


def star(p: Poly) -> Poly:
    return p.star()


# ---------------------------------------------------------------------------
# tensor polynomials
# ---------------------------------------------------------------------------

class TensorPoly:
    """Element of the algebraic tensor product of two word algebras.

    terms maps (left word, right word) to a coefficient; each leg references
    only its own roster.
    """

    __slots__ = ("terms", "left_roster", "right_roster")

    def __init__(self, terms: Optional[dict] = None, *, left_roster=(), right_roster=()):
        self.left_roster = tuple(left_roster)
        self.right_roster = tuple(right_roster)
        if terms:
            self.terms = {k: c for k, c in terms.items() if not c.is_zero()}
        else:
            self.terms = {}

    @classmethod
    def unit(cls, left_roster=(), right_roster=()) -> "TensorPoly":
        return cls({((), ()): ONE}, left_roster=left_roster, right_roster=right_roster)

    @classmethod
    def of(cls, p: Poly, q: Poly, *, left_roster=(), right_roster=()) -> "TensorPoly":
        terms = {}
        for w1, c1 in p.items():
            for w2, c2 in q.items():
                terms[(w1, w2)] = c1 * c2
        return cls(terms, left_roster=left_roster, right_roster=right_roster)

    def _check(self, other: "TensorPoly"):
        if self.left_roster != other.left_roster or self.right_roster != other.right_roster:
            raise RosterMismatch("tensor legs built over different rosters")

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return self.terms.items()

    def __add__(self, other: "TensorPoly") -> "TensorPoly":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            cur = out.get(k)
            s = c if cur is None else cur + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        t = TensorPoly.__new__(TensorPoly)
        t.terms = out
        t.left_roster = self.left_roster
        t.right_roster = self.right_roster
        return t

    def __sub__(self, other: "TensorPoly") -> "TensorPoly":
        return self + other.scale(MINUS_ONE)

    def scale(self, c) -> "TensorPoly":
        c = scalar(c)
        t = TensorPoly.__new__(TensorPoly)
        t.terms = {} if c.is_zero() else {k: v * c for k, v in self.terms.items()}
        t.left_roster = self.left_roster
        t.right_roster = self.right_roster
        return t

    def __mul__(self, other: "TensorPoly") -> "TensorPoly":
        self._check(other)
        out: dict = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                c = c1 * c2
                cur = out.get(k)
                s = c if cur is None else cur + c
                if s.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = s
        t = TensorPoly.__new__(TensorPoly)
        t.terms = out
        t.left_roster = self.left_roster
        t.right_roster = self.right_roster
        return t

    def star(self) -> "TensorPoly":
        t = TensorPoly.__new__(TensorPoly)
        t.terms = {(star_word(a), star_word(b)): c.conjugate() for (a, b), c in self.terms.items()}
        t.left_roster = self.left_roster
        t.right_roster = self.right_roster
        return t

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorPoly):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "TensorPoly(0)"
        parts = [
            f"{c}·{word_str(a)}⊗{word_str(b)}"
            for (a, b), c in sorted(self.terms.items(), key=lambda kv: (word_key(kv[0][0]), word_key(kv[0][1])))
        ]
        return "TensorPoly(" + " + ".join(parts) + ")"


def comultiply_generator(i: int, j: int, n: int, tag: str = "u") -> TensorPoly:
    """The n-term coproduct image of u_ij: sum_k u_ik (x) u_kj."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"index ({i},{j}) out of range for size {n}")
    roster = tuple(Letter(tag, r, c) for r in range(1, n + 1) for c in range(1, n + 1))
    terms = {((Letter(tag, i, k),), (Letter(tag, k, j),)): ONE for k in range(1, n + 1)}
    return TensorPoly(terms, left_roster=roster, right_roster=roster)


def apply_tensor_hom(p: Poly, images: dict, left_roster, right_roster) -> TensorPoly:
    """Extend a generator assignment Letter -> TensorPoly to p as a *-homomorphism.

    Starred letters map to the star of the assigned image; words map to the
    leg-wise product of their letters' images.
    """
    out = TensorPoly({}, left_roster=left_roster, right_roster=right_roster)
    unit = TensorPoly.unit(left_roster, right_roster)
    cache: dict = {}
    for w, c in p.items():
        img = unit
        for l in w:
            li = cache.get(l)
            if li is None:
                base_img = images.get(l.base())
                if base_img is None:
                    raise RosterMismatch(f"no image assigned for generator {letter_str(l.base())}")
                li = base_img.star() if (l.starred and l.tag not in HERMITIAN_TAGS) else base_img
                cache[l] = li
            img = img * li
        out = out + img.scale(c)
    return out


# ---------------------------------------------------------------------------
# rewrite systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    """Oriented rule: a two-letter pattern rewrites to a single word or to zero."""

    rule_id: str
    pattern: tuple
    replacement: Optional[Word]  # None encodes the zero polynomial
    kind: str

    def describe(self) -> str:
        rhs = "0" if self.replacement is None else word_str(self.replacement)
        return f"{word_str(self.pattern)} -> {rhs}"


@dataclass
class RewriteTrace:
    steps: list = field(default_factory=list)
    completed: bool = True

    def record_rule(self, rule: Rule, position: int, word: Word, terms_after: int):
        self.steps.append({
            "kind": "rule", "rule": rule.rule_id, "position": position,
            "word": word_str(word), "terms": terms_after,
        })

    def record_syzygy(self, relation_id: str, coefficient: GaussianRational):
        self.steps.append({
            "kind": "syzygy", "relation": relation_id,
            "left": "1", "right": "1",
            "coefficient": coefficient.exact_str(),
        })

    def to_json_dict(self) -> dict:
        return {"steps": list(self.steps), "completed": self.completed}


class RewriteSystem:
    """Rule table plus delta-sum syzygies for one presentation.

    canonical_column is min{k : eta_kk = 0} when the presentation is a unitary
    quantum group with at least one non-normal column; the fourfold relations
    rewrite toward the star-first word at that index.
    """

    def __init__(self, presentation, ordered_rules, syzygies, letter_order, canonical_column):
        self.presentation = presentation
        self.ordered_rules = tuple(ordered_rules)
        self.syzygies = tuple(syzygies)
        self.letter_order = tuple(letter_order)
        self.canonical_column = canonical_column
        self.rule_table = {r.pattern: r for r in self.ordered_rules}
        self.rules_by_id = {r.rule_id: r for r in self.ordered_rules}
        self._nf_cache: dict = {}
        self._syzygy_rref = None

    # -- single-word normalization -------------------------------------------------
    def normalize_word(self, w: Word, budget: int):
        """Fully rewrite one word.  Returns (word or None, chain, steps_used).

        A chain longer than the budget aborts with the partially rewritten
        word; completed normalizations are cached and re-count their chain
        length so the step accounting stays input-deterministic.
        """
        cached = self._nf_cache.get(w)
        if cached is not None:
            return cached[0], cached[1], len(cached[1])
        chain = []
        cur = w
        while True:
            hit = None
            for pos in range(len(cur) - 1):
                rule = self.rule_table.get((cur[pos], cur[pos + 1]))
                if rule is not None:
                    hit = (pos, rule)
                    break
            if hit is None:
                break
            pos, rule = hit
            chain.append((rule.rule_id, pos, cur))
            if rule.replacement is None:
                cur = None
                break
            cur = cur[:pos] + rule.replacement + cur[pos + 2:]
            if len(chain) > budget:
                return cur, tuple(chain), len(chain)
        self._nf_cache[w] = (cur, tuple(chain))
        return cur, tuple(chain), len(chain)

    def normal_form(self, p: Poly, budget: int = 100000) -> Poly:
        out: dict = {}
        for w, c in p.items():
            nf, _, _ = self.normalize_word(w, budget)
            if nf is None:
                continue
            cur = out.get(nf)
            s = c if cur is None else cur + c
            if s.is_zero():
                out.pop(nf, None)
            else:
                out[nf] = s
        q = Poly.__new__(Poly)
        q.terms = out
        return q

    # -- syzygy pass ---------------------------------------------------------------
    def syzygy_rref(self):
        """RREF of the rule-normalized syzygy polynomials, with provenance."""
        if self._syzygy_rref is None:
            pivots: dict = {}
            for rel in self.syzygies:
                row = self.normal_form(rel.poly).terms
                combo = {rel.rid: ONE}
                _rref_insert(pivots, dict(row), combo)
            self._syzygy_rref = pivots
        return self._syzygy_rref


def _rref_insert(pivots: dict, row: dict, combo: Optional[dict] = None):
    """Insert one row into an exact RREF pivot table.  Mutates pivots."""
    while row:
        lead = max(row, key=word_key)
        c = row[lead]
        hit = pivots.get(lead)
        if hit is None:
            inv = ONE / c
            norm_row = {w: v * inv for w, v in row.items()}
            norm_combo = None if combo is None else {k: v * inv for k, v in combo.items()}
            pivots[lead] = (norm_row, norm_combo)
            return lead
        prow, pcombo = hit
        del row[lead]
        for w, v in prow.items():
            if w == lead:
                continue
            cur = row.get(w)
            s = -(c * v) if cur is None else cur - c * v
            if s.is_zero():
                row.pop(w, None)
            else:
                row[w] = s
        if combo is not None and pcombo is not None:
            for k, v in pcombo.items():
                cur = combo.get(k)
                s = -(c * v) if cur is None else cur - c * v
                if s.is_zero():
                    combo.pop(k, None)
                else:
                    combo[k] = s
    return None


def _rref_reduce(pivots: dict, row: dict, on_use=None) -> dict:
    """Reduce a row against the pivot table; returns the residue (mutates row)."""
    while True:
        lead = None
        for w in row:
            if w in pivots and (lead is None or word_key(w) > word_key(lead)):
                lead = w
        if lead is None:
            return row
        c = row.pop(lead)
        prow, pcombo = pivots[lead]
        if on_use is not None:
            on_use(lead, c, prow, pcombo)
        for w, v in prow.items():
            if w == lead:
                continue
            cur = row.get(w)
            s = -(c * v) if cur is None else cur - c * v
            if s.is_zero():
                row.pop(w, None)
            else:
                row[w] = s


def rewrite(p: Poly, rs: RewriteSystem, max_steps: int = 100000):
    """Rule saturation plus syzygy linear passes, iterated to a fixpoint.

    Returns (reduced Poly, RewriteTrace).  Hitting the step budget flags the
    trace incomplete; callers downgrade such results to Inconclusive.
    """
    trace = RewriteTrace()
    steps = 0
    cur = p
    for _round in range(64):
        # rule phase: normalize every word (largest first, leftmost position first)
        out: dict = {}
        pending = sorted(cur.terms, key=word_key, reverse=True)
        for wi, w in enumerate(pending):
            c = cur.terms[w]
            nf, chain, used = rs.normalize_word(w, max_steps - steps)
            steps += used
            for rule_id, pos, before in chain:
                trace.record_rule(rs.rules_by_id[rule_id], pos, before,
                                  0 if rs.rules_by_id[rule_id].replacement is None else 1)
            if nf is not None:
                cc = out.get(nf)
                s = c if cc is None else cc + c
                if s.is_zero():
                    out.pop(nf, None)
                else:
                    out[nf] = s
            if steps > max_steps:
                # best-effort partial result: keep the untouched tail as-is
                trace.completed = False
                for ww in pending[wi + 1:]:
                    out[ww] = out.get(ww, ZERO) + cur.terms[ww]
                return Poly(out), trace
        ruled = Poly.__new__(Poly)
        ruled.terms = out

        # syzygy pass: one linear reduction against the normalized delta-sum span
        pivots = rs.syzygy_rref()
        row = dict(ruled.terms)
        used_combo: dict = {}

        def on_use(lead, c, prow, pcombo):
            nonlocal steps
            steps += 1
            if pcombo:
                for rid, v in pcombo.items():
                    cur_v = used_combo.get(rid)
                    s = c * v if cur_v is None else cur_v + c * v
                    if s.is_zero():
                        used_combo.pop(rid, None)
                    else:
                        used_combo[rid] = s

        _rref_reduce(pivots, row, on_use)
        for rid in sorted(used_combo):
            trace.record_syzygy(rid, used_combo[rid])
        reduced = Poly.__new__(Poly)
        reduced.terms = row
        if reduced == cur:
            return reduced, trace
        cur = reduced
        if steps > max_steps:
            trace.completed = False
            return cur, trace
    trace.completed = False
    return cur, trace


def replay_rewrite(p: Poly, rs: RewriteSystem, trace: RewriteTrace) -> Poly:
    """Mechanically re-apply a recorded trace; raises if any step fails to apply.

    Rule steps name a word present in the current polynomial and a position;
    syzygy steps subtract coefficient times the rule-normalized delta-sum
    polynomial they cite.  The arithmetic is exact, so a ProvedZero trace must
    replay to the literal zero polynomial.
    """
    cur = dict(p.terms)

    def _find(word_text):
        for w in cur:
            if word_str(w) == word_text:
                return w
        raise ValueError(f"trace step refers to absent word {word_text}")

    for step in trace.steps:
        if step["kind"] == "rule":
            rule = rs.rules_by_id[step["rule"]]
            w = _find(step["word"])
            pos = step["position"]
            if w[pos:pos + 2] != rule.pattern:
                raise ValueError(f"rule {rule.rule_id} does not apply at position {pos} of {word_str(w)}")
            c = cur.pop(w)
            if rule.replacement is not None:
                nw = w[:pos] + rule.replacement + w[pos + 2:]
                s = cur.get(nw, ZERO) + c
                if s.is_zero():
                    cur.pop(nw, None)
                else:
                    cur[nw] = s
        else:
            rel = next(r for r in rs.syzygies if r.rid == step["relation"])
            c = parse_scalar(step["coefficient"])
            for w, v in rs.normal_form(rel.poly).terms.items():
                s = cur.get(w, ZERO) - c * v
                if s.is_zero():
                    cur.pop(w, None)
                else:
                    cur[w] = s
    q = Poly.__new__(Poly)
    q.terms = cur
    return q


# ---------------------------------------------------------------------------
# rule construction per presentation family
# ---------------------------------------------------------------------------

def build_rewrite_system(pres) -> RewriteSystem:
    kind = pres.kind
    if kind == "complex-sphere":
        rules, k0 = _sphere_rules(pres)
    elif kind == "unitary-qg":
        rules, k0 = _unitary_rules(pres)
    elif kind in ("orthogonal-qg", "tuple-space"):
        rules, k0 = _starless_rules(pres)
    else:
        raise ValueError(f"unknown presentation kind {kind!r}")
    # zero rules first, then substitutions, then oriented commutations/exchanges
    precedence = {"zero": 0, "column-canon": 1, "row-canon": 1}
    rules.sort(key=lambda r: (precedence.get(r.kind, 2), r.pattern))
    letters = _roster_letters(pres)
    syz = tuple(m for fam in pres.sum_families for m in fam.members)
    return RewriteSystem(pres, rules, syz, letters, k0)


def _roster_letters(pres) -> list:
    letters = list(pres.generators)
    if pres.generators and pres.generators[0].tag not in HERMITIAN_TAGS:
        letters += [g.star() for g in pres.generators]
    letters.sort()
    return letters


def _oriented(rules: list, kind: str, lhs: Word, rhs: Word, require_smaller=True):
    if lhs == rhs:
        return
    if require_smaller and not word_key(rhs) < word_key(lhs):
        return
    rules.append(Rule(f"{kind}[{word_str(lhs)}->{word_str(rhs)}]", lhs, rhs, kind))


def _zero_rule(rules: list, lhs: Word):
    rules.append(Rule(f"zero[{word_str(lhs)}]", lhs, None, "zero"))


def _sphere_rules(pres):
    pair = pres.source_pair
    n, eps, eta = pair.n, pair.epsilon, pair.eta
    rules: list = []
    for a in range(1, n + 1):
        for c in range(1, n + 1):
            xa = Letter("x", a, 0)
            xc = Letter("x", c, 0)
            if a != c and eps[a - 1][c - 1]:
                for s in (False, True):
                    l1 = Letter("x", a, 0, s)
                    l2 = Letter("x", c, 0, s)
                    _oriented(rules, "eps-comm", (l1, l2), (l2, l1))
            if eta[a - 1][c - 1]:
                w_star_first = (xa.star(), xc)
                w_plain_first = (xc, xa.star())
                if word_key(w_plain_first) < word_key(w_star_first):
                    _oriented(rules, "eta-comm", w_star_first, w_plain_first)
                else:
                    _oriented(rules, "eta-comm", w_plain_first, w_star_first)
    return rules, None


def _unitary_rules(pres):
    pair = pres.source_pair
    n, eps, eta = pair.n, pair.epsilon, pair.eta
    free_cols = [k for k in range(1, n + 1) if eta[k - 1][k - 1] == 0]
    k0 = free_cols[0] if free_cols else None
    rules: list = []
    idx = range(1, n + 1)

    def u(r, c, s=False):
        return Letter("u", r, c, s)

    for a in idx:
        for b in idx:
            for c in idx:
                for d in idx:
                    e_rows = eps[a - 1][c - 1]
                    e_cols = eps[b - 1][d - 1]
                    # same-star shapes carry the epsilon exchange relations
                    for s in (False, True):
                        lhs = (u(a, b, s), u(c, d, s))
                        if e_rows and e_cols:
                            _oriented(rules, "eps-comm", lhs, (u(c, d, s), u(a, b, s)))
                        elif e_rows:
                            _oriented(rules, "eps-xrow", lhs, (u(c, b, s), u(a, d, s)))
                        elif e_cols:
                            _oriented(rules, "eps-xcol", lhs, (u(a, d, s), u(c, b, s)))
                    h_rows = eta[a - 1][c - 1]
                    h_cols = eta[b - 1][d - 1]
                    # star-first mixed shape u_ab* u_cd
                    lhs = (u(a, b, True), u(c, d))
                    if h_rows and h_cols:
                        _oriented(rules, "eta-comm", lhs, (u(c, d), u(a, b, True)))
                    elif h_rows and not h_cols and b != d:
                        _zero_rule(rules, lhs)
                    elif h_cols and not h_rows and a != c:
                        _zero_rule(rules, lhs)
                    elif h_rows and b == d and eta[b - 1][b - 1] == 0:
                        _oriented(rules, "column-canon", lhs, (u(a, k0, True), u(c, k0)), require_smaller=False)
                    elif a == c and h_cols and eta[a - 1][a - 1] == 0:
                        _oriented(rules, "row-canon", lhs, (u(k0, b, True), u(k0, d)), require_smaller=False)
                    # plain-first mixed shape u_ab u_cd*
                    lhs = (u(a, b), u(c, d, True))
                    if h_rows and h_cols:
                        _oriented(rules, "eta-comm", lhs, (u(c, d, True), u(a, b)))
                    elif h_rows and not h_cols and b != d:
                        _zero_rule(rules, lhs)
                    elif h_cols and not h_rows and a != c:
                        _zero_rule(rules, lhs)
                    elif h_rows and b == d and eta[b - 1][b - 1] == 0:
                        # u_ab u_cb* is the plain-first fourfold word with roles swapped
                        _oriented(rules, "column-canon", lhs, (u(c, k0, True), u(a, k0)), require_smaller=False)
                    elif a == c and h_cols and eta[a - 1][a - 1] == 0:
                        _oriented(rules, "row-canon", lhs, (u(k0, d, True), u(k0, b)), require_smaller=False)
    return rules, k0


def _starless_rules(pres):
    pair = pres.source_pair
    n, eps = pair.n, pair.epsilon
    tag = "ou" if pres.kind == "orthogonal-qg" else "tx"
    rules: list = []
    idx = range(1, n + 1)
    for a in idx:
        for b in idx:
            for c in idx:
                for d in idx:
                    lhs = (Letter(tag, a, b), Letter(tag, c, d))
                    e_rows = eps[a - 1][c - 1]
                    e_cols = eps[b - 1][d - 1]
                    if e_rows and e_cols:
                        _oriented(rules, "eps-comm", lhs, (Letter(tag, c, d), Letter(tag, a, b)))
                    elif e_rows or e_cols:
                        _zero_rule(rules, lhs)
    return rules, None


# ---------------------------------------------------------------------------
# degree-bounded quotient bases
# ---------------------------------------------------------------------------

class QuotientBasis:
    """Linear reduction data modulo the span of all degree-<=bound relations.

    The span is star-closed: it contains each presentation relation together
    with its star, so reduce(star(p)) vanishes exactly when reduce(p) does.
    """

    def __init__(self, presentation, degree_bound: int = 2, *, entry_cap: int = 2_000_000):
        if degree_bound < 2:
            raise ValueError("degree bound must be at least 2")
        self.presentation = presentation
        self.degree_bound = degree_bound
        letters = _roster_letters(presentation)
        count = sum(len(letters) ** d for d in range(degree_bound + 1))
        if count > entry_cap:
            raise DimensionCap(f"{count} monomials exceed the configured cap {entry_cap}")
        self.monomials = words_up_to(letters, degree_bound)
        self._pivots: dict = {}
        self._entry_cap = entry_cap
        self._entries = 0
        self.relation_rows = 0
        seen = set()
        for rel in presentation.all_relations():
            for poly in (rel.poly, rel.poly.star()):
                key = frozenset((w, c.exact_str()) for w, c in poly.items())
                if key in seen or poly.is_zero():
                    continue
                seen.add(key)
                if poly.degree() > degree_bound:
                    continue
                self._insert(dict(poly.terms))
                self.relation_rows += 1
        self._residue_cache: dict = {}

    def _insert(self, row: dict):
        _rref_insert(self._pivots, row)
        self._entries = sum(len(r) for r, _ in self._pivots.values())
        if self._entries > self._entry_cap:
            raise DimensionCap(f"relation span exceeded {self._entry_cap} sparse entries")

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def residue_word(self, w: Word):
        """Reduced coordinates of a single word, as a list of (word, coeff)."""
        res = self._residue_cache.get(w)
        if res is None:
            row = _rref_reduce(self._pivots, {w: ONE})
            res = list(row.items())
            self._residue_cache[w] = res
        return res

    def reduce(self, p: Poly) -> Poly:
        out: dict = {}
        for w, c in p.items():
            if len(w) > self.degree_bound:
                raise ValueError(f"word degree {len(w)} exceeds basis bound {self.degree_bound}")
            for m, v in self.residue_word(w):
                cur = out.get(m)
                s = c * v if cur is None else cur + c * v
                if s.is_zero():
                    out.pop(m, None)
                else:
                    out[m] = s
        q = Poly.__new__(Poly)
        q.terms = out
        return q

    def descriptor(self) -> dict:
        return {
            "presentation": getattr(self.presentation, "label", self.presentation.kind),
            "degree_bound": self.degree_bound,
            "relation_rows": self.relation_rows,
            "rank": self.rank,
            "monomials": len(self.monomials),
        }


def build_quotient_basis(pres, bound: int = 2, **kw) -> QuotientBasis:
    return QuotientBasis(pres, bound, **kw)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

PROVED_ZERO = "ProvedZero"
PROVED_NONZERO = "ProvedNonzero"
INCONCLUSIVE = "Inconclusive"


@dataclass
class Certificate:
    status: str
    zero_evidence: Optional[dict] = None
    nonzero_evidence: Optional[dict] = None
    detail: str = ""

    def to_json_dict(self) -> dict:
        out = {"status": self.status}
        if self.zero_evidence is not None:
            out["zero_evidence"] = self.zero_evidence
        if self.nonzero_evidence is not None:
            out["nonzero_evidence"] = self.nonzero_evidence
        if self.detail:
            out["detail"] = self.detail
        return out


def is_zero_tensor(t: TensorPoly, left: QuotientBasis, right: QuotientBasis) -> Certificate:
    """Leg-wise quotient reduction of a tensor element.

    ProvedZero is sound because both spans contain only genuine relations; a
    nonzero reduction is merely Inconclusive until a matrix witness exists.
    """
    if t.left_roster and tuple(t.left_roster) != tuple(left.presentation.generators):
        raise RosterMismatch("left leg roster does not match the left basis")
    if t.right_roster and tuple(t.right_roster) != tuple(right.presentation.generators):
        raise RosterMismatch("right leg roster does not match the right basis")
    acc: dict = {}
    for (w1, w2), c in t.items():
        r1 = left.residue_word(w1)
        if not r1:
            continue
        r2 = right.residue_word(w2)
        if not r2:
            continue
        for m1, c1 in r1:
            cc1 = c * c1
            for m2, c2 in r2:
                k = (m1, m2)
                v = cc1 * c2
                cur = acc.get(k)
                s = v if cur is None else cur + v
                if s.is_zero():
                    acc.pop(k, None)
                else:
                    acc[k] = s
    if not acc:
        return Certificate(PROVED_ZERO, zero_evidence={
            "kind": "tensor-quotient",
            "left_basis": left.descriptor(),
            "right_basis": right.descriptor(),
            "terms": len(t.terms),
        })
    sample = min(acc, key=lambda k: (word_key(k[0]), word_key(k[1])))
    return Certificate(
        INCONCLUSIVE,
        detail=(f"{len(acc)} coordinate(s) survive leg-wise reduction, "
                f"e.g. {word_str(sample[0])} ⊗ {word_str(sample[1])} with coefficient {acc[sample]}"),
    )


def ideal_membership_bounded(p: Poly, pres, product_bound: int = 2, *,
                             want_combination: bool = True,
                             entry_cap: int = 2_000_000) -> Certificate:
    """Membership of p in the span of m1 * r * m2, total degree <= product_bound.

    ProvedZero evidence carries the exact linear combination (with cleared
    denominators, so the certificate shows integer coefficients such as the
    factor 2 in the vanishing column-product computation).
    """
    if p.degree() > product_bound:
        raise ValueError(f"degree {p.degree()} exceeds product bound {product_bound}")
    letters = _roster_letters(pres)
    gens = _star_closed_relations(pres)
    pivots: dict = {}
    entries = 0
    for rid, rpoly in gens:
        deg_r = rpoly.degree()
        if deg_r > product_bound:
            continue
        pad = product_bound - deg_r
        left_words = words_up_to(letters, pad)
        for m1 in left_words:
            rest = pad - len(m1)
            for m2 in words_up_to(letters, rest):
                row_poly = Poly.from_word(m1) * rpoly * Poly.from_word(m2) if (m1 or m2) else rpoly
                if row_poly.is_zero():
                    continue
                combo = {(rid, m1, m2): ONE} if want_combination else None
                _rref_insert(pivots, dict(row_poly.terms), combo)
                entries += len(row_poly.terms)
                if entries > entry_cap:
                    raise DimensionCap(f"product span exceeded {entry_cap} sparse entries")
    used: dict = {}

    def on_use(lead, c, prow, pcombo):
        if pcombo:
            for k, v in pcombo.items():
                cur = used.get(k)
                s = c * v if cur is None else cur + c * v
                if s.is_zero():
                    used.pop(k, None)
                else:
                    used[k] = s

    residue = _rref_reduce(pivots, dict(p.terms), on_use if want_combination else None)
    if residue:
        return Certificate(INCONCLUSIVE,
                           detail=f"{len(residue)} monomial(s) outside the bounded product span")
    if not want_combination:
        return Certificate(PROVED_ZERO, zero_evidence={
            "kind": "linear-combination", "product_bound": product_bound, "terms": None})
    mult = 1
    for c in used.values():
        mult = mult * c.q // gcd(mult, c.q)
    mult_scalar = GaussianRational(mult)
    terms = [
        {"relation": rid, "left": word_str(m1), "right": word_str(m2),
         "coefficient": (c * mult_scalar).exact_str()}
        for (rid, m1, m2), c in sorted(used.items(), key=lambda kv: (kv[0][0], word_key(kv[0][1]), word_key(kv[0][2])))
    ]
    return Certificate(PROVED_ZERO, zero_evidence={
        "kind": "linear-combination",
        "product_bound": product_bound,
        "lhs_multiple": str(mult),
        "terms": terms,
    })


def _star_closed_relations(pres):
    out = []
    seen = set()
    for rel in pres.all_relations():
        for rid, poly in ((rel.rid, rel.poly), (f"star({rel.rid})", rel.poly.star())):
            key = frozenset((w, c.exact_str()) for w, c in poly.items())
            if key in seen or poly.is_zero():
                continue
            seen.add(key)
            out.append((rid, poly))
    return out


def replay_combination(p: Poly, pres, evidence: dict) -> bool:
    """Exactly recompute lhs_multiple * p == sum coeff_i * (m1_i r_i m2_i)."""
    from .scalars import parse_scalar
    rels = dict(_star_closed_relations(pres))
    letters = {word_str((l,)): l for l in _roster_letters(pres)}

    def parse_word(text):
        if text == "1":
            return ()
        return tuple(letters[tok] for tok in text.split("."))

    total = Poly.zero()
    for term in evidence["terms"]:
        rpoly = rels[term["relation"]]
        m1 = parse_word(term["left"])
        m2 = parse_word(term["right"])
        c = parse_scalar(term["coefficient"])
        total = total + (Poly.from_word(m1) * rpoly * Poly.from_word(m2)).scale(c)
    mult = int(evidence["lhs_multiple"])
    return total == p.scale(mult)
