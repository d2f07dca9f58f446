"""
The weighted Koszul complex, its subcomplexes M_(l) and N_(l), their quotient
complexes, duals, and presentations of the syzygy modules Syz^j = ker d^{-j}.

Basis elements of K^{-j} are the subsets I of {0..n} with |I| = j in
lexicographic order. Every sign below derives from that order:

    d(e_I) = sum_{i in I} (-1)^{#{i' in I : i' < i}} x_i e_{I - i}

Shifting by [k] multiplies the differentials by (-1)^k and dualizing
transposes them without signs.
"""
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Optional, Sequence

import numpy as np

from common import (DEFAULT_PRIME, CheckResult, FieldSpec, RESOLVED, ToolkitError,
                    WindowError, check, make_rng, progress)
from gla import (GradedFree, GradedMatrix, Presentation, degree_piece, matmul,
                 rank, zeros)
from ring import PolyRing, Weights

Subset = tuple[int, ...]

def subsets(n_vars: int, size: int) -> list[Subset]:
    return list(combinations(range(n_vars), size))

def koszul_sign(I: Subset, i: int) -> int:
    return -1 if sum(1 for k in I if k < i) % 2 else 1

@dataclass
class TwistedComplex:
    """Cochain complex of graded free modules in positions lo..hi.

    diffs[p] maps terms[p] -> terms[p+1]. labels[p] names the summands of
    terms[p] (Koszul subsets) when the complex comes from K.
    """
    ring: PolyRing
    terms: dict[int, GradedFree]
    diffs: dict[int, GradedMatrix]
    labels: dict[int, list] = field(default_factory=dict)
    twist: int = 0
    name: str = ''

    @property
    def lo(self) -> int:
        return min(self.terms, default=0)

    @property
    def hi(self) -> int:
        return max(self.terms, default=-1)

    @property
    def weights(self) -> Weights:
        return self.ring.weights

    def term(self, p: int) -> GradedFree:
        return self.terms.get(p, GradedFree(self.weights, ()))

    def diff(self, p: int) -> GradedMatrix:
        if p in self.diffs:
            return self.diffs[p]
        return GradedMatrix.zero(self.ring, self.term(p), self.term(p + 1))

    def positions(self) -> range:
        return range(self.lo, self.hi + 1)

    def shift(self, k: int) -> 'TwistedComplex':
        """C[k]: term at p moves to p - k, differentials times (-1)^k."""
        sign = -1 if k % 2 else 1
        diffs = {p - k: _scale_matrix(M, sign) for p, M in self.diffs.items()}
        return TwistedComplex(self.ring, {p - k: T for p, T in self.terms.items()}, diffs,
                              {p - k: L for p, L in self.labels.items()}, self.twist, f'{self.name}[{k}]')

    def twisted(self, l: int) -> 'TwistedComplex':
        """C(l)."""
        terms = {p: GradedFree(self.weights, tuple(a - l for a in T.twists)) for p, T in self.terms.items()}
        diffs = {p: GradedMatrix(self.ring, terms[p], terms[p + 1], M.entries) for p, M in self.diffs.items()}
        return TwistedComplex(self.ring, terms, diffs, dict(self.labels), self.twist + l, f'{self.name}({l})')

    def truncate_ge(self, a: int) -> 'TwistedComplex':
        keep = {p: T for p, T in self.terms.items() if p >= a}
        return TwistedComplex(self.ring, keep, {p: M for p, M in self.diffs.items() if p >= a},
                              {p: L for p, L in self.labels.items() if p >= a}, self.twist, self.name)

    def truncate_lt(self, a: int) -> 'TwistedComplex':
        keep = {p: T for p, T in self.terms.items() if p < a}
        return TwistedComplex(self.ring, keep, {p: M for p, M in self.diffs.items() if p + 1 < a},
                              {p: L for p, L in self.labels.items() if p < a}, self.twist, self.name)

    def term_multiset(self) -> list[tuple[int, int]]:
        """Sorted (position, a) pairs, one per summand P(-a)."""
        return sorted((p, a) for p, T in self.terms.items() for a in T.twists)

    def dim(self, p: int, d: int) -> int:
        return self.term(p).dim(d)

    def euler_characteristic(self, d: int) -> int:
        return sum((-1) ** (p % 2) * self.dim(p, d) for p in self.terms)

    def check_dd(self) -> bool:
        """d o d = 0 as polynomial matrices."""
        for p in self.positions():
            if p in self.diffs and p + 1 in self.diffs:
                comp = self.diffs[p + 1].compose(self.diffs[p])
                if not comp.is_zero():
                    return False
        return True

    def to_json(self) -> dict:
        return {'name': self.name, 'twist': self.twist,
                'positions': {str(p): {'twists': list(self.terms[p].twists),
                                       'differential': self.diffs[p].to_json() if p in self.diffs else None}
                              for p in sorted(self.terms)}}

def _scale_matrix(M: GradedMatrix, sign: int) -> GradedMatrix:
    if sign == 1:
        return M
    return GradedMatrix(M.ring, M.source, M.target, [[-g for g in row] for row in M.entries])

def koszul(w: Weights, field_spec: Optional[FieldSpec] = None) -> TwistedComplex:
    """K^{-j} = sum over |I| = j of P(-|w_I|), positions -(n+1)..0."""
    F = field_spec or FieldSpec(DEFAULT_PRIME)
    ring = PolyRing(w, F)
    nv = len(w)
    terms, labels, diffs = {}, {}, {}
    for j in range(nv + 1):
        labels[-j] = subsets(nv, j)
        terms[-j] = GradedFree(w, tuple(w.subset_sum(I) for I in labels[-j]))
    for j in range(1, nv + 1):
        src, tgt = labels[-j], labels[-j + 1]
        index = {J: k for k, J in enumerate(tgt)}
        entries = [[ring.zero() for _ in src] for _ in tgt]
        for c, I in enumerate(src):
            for i in I:
                J = tuple(k for k in I if k != i)
                entries[index[J]][c] = ring.var(i).scale(koszul_sign(I, i))
        diffs[-j] = GradedMatrix(ring, terms[-j], terms[-j + 1], entries)
    return TwistedComplex(ring, terms, diffs, labels, 0, f'K({w})')

KINDS = ('M', 'N', "M'", "N'", 'trivialN')

@dataclass(frozen=True)
class SubcomplexSpec:
    kind: str
    l: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ToolkitError(f"unknown subcomplex kind {self.kind!r}")

    def check_window(self, w: Weights):
        n, total = w.n, w.total
        if self.kind in ('M', "M'"):
            ok = -total < self.l <= 0
            window = f'{-total} < l <= 0'
        elif self.kind in ('N', "N'"):
            ok = n - total < self.l < 0
            window = f'{n - total} < l < 0'
        else:
            ok = 0 <= self.l <= n
            window = f'0 <= l <= {n}'
        if not ok:
            raise WindowError(f"{self.kind}_({self.l}) outside its window {window}")

def _keeps(kind: str, l: int, size: int, weight: int) -> bool:
    """Whether the Koszul summand e_I, |I| = size, lies in the subcomplex."""
    if kind == 'M':
        return weight <= -l
    return weight < -l + size

def _restrict(K: TwistedComplex, keep, name: str, position_offset: int = 0, sign: int = 1) -> TwistedComplex:
    """Block of K on the summands selected by keep(size, weight), moved by position_offset."""
    ring = K.ring
    w = ring.weights
    chosen = {p: [k for k, I in enumerate(K.labels[p]) if keep(len(I), w.subset_sum(I))] for p in K.terms}
    terms, labels, diffs = {}, {}, {}
    for p, idx in chosen.items():
        if not idx:
            continue
        q = p + position_offset
        terms[q] = GradedFree(w, tuple(K.terms[p].twists[k] for k in idx))
        labels[q] = [K.labels[p][k] for k in idx]
    for p, M in K.diffs.items():
        src, tgt = chosen.get(p, []), chosen.get(p + 1, [])
        if src and tgt:
            block = M.submatrix(tgt, src)
            diffs[p + position_offset] = _scale_matrix(block, sign)
    return TwistedComplex(ring, terms, diffs, labels, K.twist, name)

def build_subcomplex(w: Weights, spec: SubcomplexSpec, field_spec: Optional[FieldSpec] = None) -> TwistedComplex:
    """M_(l), N_(l) inside K(-l), the quotients M'_(l), N'_(l) placed one step right, or O(-l)[l]."""
    spec.check_window(w)
    l = spec.l
    K = koszul(w, field_spec).twisted(-l)
    label = f'{spec.kind}_({l})'
    if spec.kind == 'trivialN':
        ring = K.ring
        return TwistedComplex(ring, {-l: GradedFree(w, (l,))}, {}, {-l: [()]}, -l, label)
    if spec.kind in ('M', 'N'):
        C = _restrict(K, lambda size, weight: _keeps(spec.kind, l, size, weight), label)
        _assert_closed(K, C, spec)
        return C
    base = spec.kind[0]
    # the quotient K(-l)/sub, shifted by [-1]
    return _restrict(K, lambda size, weight: not _keeps(base, l, size, weight), label, 1, -1)

def _assert_closed(K: TwistedComplex, C: TwistedComplex, spec: SubcomplexSpec):
    """Every retained column of the Koszul differential only hits retained rows."""
    w = K.weights
    for p, M in K.diffs.items():
        for c, I in enumerate(K.labels[p]):
            if not _keeps(spec.kind, spec.l, len(I), w.subset_sum(I)):
                continue
            for r, J in enumerate(K.labels[p + 1]):
                if not M.entries[r][c].is_zero() and not _keeps(spec.kind, spec.l, len(J), w.subset_sum(J)):
                    raise ToolkitError(f"{C.name} is not closed under the differential at {I} -> {J}")

def syzygy_presentation(w: Weights, j: int, field_spec: Optional[FieldSpec] = None) -> tuple[Presentation, GradedMatrix]:
    """Syz^j as coker(d^{-j-2}) embedded into K^{-j} by d^{-j-1}."""
    n = w.n
    if not 0 <= j <= n:
        raise WindowError(f"Syz^{j} needs 0 <= j <= {n}")
    K = koszul(w, field_spec)
    ring = K.ring
    if j == 0:
        free = GradedFree(w, (0,))
        return Presentation.free(ring, (0,)), GradedMatrix.identity(ring, free)
    gens = K.term(-j - 1)
    relations = K.diffs.get(-j - 2) or GradedMatrix.zero(ring, GradedFree(w, ()), gens)
    return Presentation(ring, gens, relations), K.diffs[-j - 1]

def verify_syzygy_image(w: Weights, j: int, degrees: Sequence[int], field_spec: Optional[FieldSpec] = None) -> CheckResult:
    """Image of the embedding equals ker d^{-j} degree by degree."""
    K = koszul(w, field_spec)
    F = K.ring.field
    _, emb = syzygy_presentation(w, j, field_spec)
    bad = []
    for d in degrees:
        if j == 0:
            break
        kernel = K.dim(-j, d) - (rank(F, degree_piece(K.diffs[-j], d)) if -j in K.diffs else 0)
        image = rank(F, degree_piece(emb, d))
        if kernel != image:
            bad.append((d, kernel, image))
    return check(f'syzygy_image_{j}', not bad, witness=str(bad[:3]) if bad else None, degrees=list(degrees))

def generic_rank(M: GradedMatrix, seed: int = 0) -> int:
    """Rank of M evaluated at a random point."""
    F = M.ring.field
    rng = make_rng(seed)
    point = [F.random(rng, nonzero=True) for _ in range(M.ring.nvars)]
    A = zeros(F, M.target.rank, M.source.rank)
    for i, row in enumerate(M.entries):
        for k, g in enumerate(row):
            A[i, k] = g.evaluate(point)
    return rank(F, A)

def _iso_sign(j: int, n: int, I: Subset) -> int:
    return -1 if (j * (n + 1) + sum(I)) % 2 else 1

def dualize(C: TwistedComplex, twist: int = 0) -> TwistedComplex:
    """Hom(C, P(twist)): the term at p is the dual of C^{-p}, differentials transposed."""
    w = C.weights
    terms, labels, diffs = {}, {}, {}
    for p, T in C.terms.items():
        terms[-p] = T.dual(-twist)
        if p in C.labels:
            labels[-p] = list(C.labels[p])
    for p, M in C.diffs.items():
        # d^p: C^p -> C^{p+1} dualizes to C^{p+1 v} -> C^{p v}, i.e. position -p-1 -> -p
        diffs[-p - 1] = M.dual(-twist)
    return TwistedComplex(C.ring, terms, diffs, labels, twist - C.twist, f'{C.name}^v')

def self_duality_iso(w: Weights, field_spec: Optional[FieldSpec] = None) -> tuple[TwistedComplex, TwistedComplex, dict[int, GradedMatrix]]:
    """K^v and K(|w|)[-n-1] with the signed complement isomorphism between them."""
    n = w.n
    K = koszul(w, field_spec)
    ring = K.ring
    D = dualize(K, 0)
    T = K.twisted(w.total).shift(-n - 1)
    full = tuple(range(n + 1))
    iso = {}
    for p in D.terms:
        src, tgt = D.labels[p], T.labels[p]
        index = {J: k for k, J in enumerate(tgt)}
        entries = [[ring.zero() for _ in src] for _ in tgt]
        for c, I in enumerate(src):
            J = tuple(k for k in full if k not in I)
            entries[index[J]][c] = ring.const(_iso_sign(len(I), n, I))
        iso[p] = GradedMatrix(ring, D.terms[p], T.terms[p], entries)
    return D, T, iso

def check_self_duality(w: Weights, degrees: Sequence[int], field_spec: Optional[FieldSpec] = None) -> CheckResult:
    """The signed complement map commutes with the differentials in every degree."""
    D, T, iso = self_duality_iso(w, field_spec)
    F = D.ring.field
    bad = []
    for p in D.diffs:
        for d in degrees:
            lhs = matmul(F, degree_piece(iso[p + 1], d), degree_piece(D.diffs[p], d))
            rhs = matmul(F, degree_piece(T.diff(p), d), degree_piece(iso[p], d))
            if not np.array_equal(lhs, rhs):
                bad.append((p, d))
    return check('koszul_self_duality', not bad, witness=str(bad[:3]) if bad else None, weights=list(w))

@dataclass
class ExactnessReport:
    homology: dict[tuple[int, int], int]
    degrees: list[int]

    @property
    def exact(self) -> bool:
        return not self.homology

    def as_check(self, name: str, expected: Optional[dict] = None) -> CheckResult:
        expected = expected or {}
        ok = self.homology == expected
        return check(name, ok, RESOLVED, None if ok else str(sorted(self.homology.items())[:5]),
                     nonzero={f'{p}@{d}': h for (p, d), h in sorted(self.homology.items())})

def check_exactness(C: TwistedComplex, degrees: Sequence[int]) -> ExactnessReport:
    """dim ker - dim im at every position and degree; only nonzero values are kept."""
    F = C.ring.field
    homology = {}
    for d in progress(list(degrees), desc='homology'):
        ranks = {p: rank(F, degree_piece(C.diffs[p], d)) for p in C.diffs}
        for p in C.positions():
            h = C.dim(p, d) - ranks.get(p, 0) - ranks.get(p - 1, 0)
            if h:
                homology[(p, d)] = h
    return ExactnessReport(homology, list(degrees))

import unittest

W = Weights((1, 1, 2, 3))

class TestKoszul(unittest.TestCase):
    def test_terms(self):
        K = koszul(W)
        self.assertEqual(sorted(K.term(-1).twists), [1, 1, 2, 3])
        self.assertEqual(sorted(K.term(-2).twists), [2, 3, 3, 4, 4, 5])
        self.assertEqual(list(K.term(-4).twists), [7])
        self.assertTrue(K.check_dd())

    def test_single_variable(self):
        K = koszul(Weights((1,)))
        self.assertEqual(K.term_multiset(), [(-1, 1), (0, 0)])
        self.assertEqual(K.diffs[-1].entries, [[K.ring.var(0)]])

    def test_exact_except_residue_field(self):
        for w in [(1, 1, 1, 1), (1, 1, 2, 3), (1, 2, 3)]:
            report = check_exactness(koszul(Weights(w)), range(0, 13))
            self.assertEqual(report.homology, {(0, 0): 1}, w)

    def test_zero_differentials(self):
        K = koszul(W)
        bare = TwistedComplex(K.ring, K.terms, {}, K.labels)
        report = check_exactness(bare, [3])
        self.assertEqual(sum(report.homology.values()), sum(T.dim(3) for T in K.terms.values()))

    def test_self_duality_signs(self):
        for w in [(1, 1, 2, 3), (1, 2), (2, 3, 5)]:
            self.assertTrue(check_self_duality(Weights(w), range(0, 11)).passed, w)

    def test_double_dual(self):
        K = koszul(W)
        DD = dualize(dualize(K, 0), 0)
        self.assertEqual(DD.term_multiset(), K.term_multiset())
        for p in K.diffs:
            self.assertEqual(DD.diffs[p].entries, K.diffs[p].entries)

class TestSubcomplexes(unittest.TestCase):
    def test_m_zero(self):
        M = build_subcomplex(W, SubcomplexSpec('M', 0))
        self.assertEqual(M.term_multiset(), [(0, 0)])

    def test_n_minus_three(self):
        N = build_subcomplex(W, SubcomplexSpec('N', -3))
        self.assertEqual(sorted(N.term(0).twists), [-3])
        self.assertEqual(sorted(N.term(-1).twists), [-2, -2, -1, 0])
        self.assertEqual(sorted(a + 3 for a in N.term(-2).twists), [2, 3, 3, 4, 4])
        self.assertEqual(sorted(a + 3 for a in N.term(-3).twists), [4, 5])
        self.assertNotIn(-4, N.terms)

    def test_trivial_n(self):
        C = build_subcomplex(W, SubcomplexSpec('trivialN', 2))
        self.assertEqual(C.term_multiset(), [(-2, 2)])

    def test_windows(self):
        for kind, l in [('M', 1), ('M', -7), ('N', 0), ('N', -4), ('trivialN', 4), ("M'", -7)]:
            with self.assertRaises(WindowError):
                build_subcomplex(W, SubcomplexSpec(kind, l))
        with self.assertRaises(ToolkitError):
            SubcomplexSpec('X', 0)

    def test_term_counts_and_euler(self):
        for l in range(-6, 1):
            M = build_subcomplex(W, SubcomplexSpec('M', l))
            Mq = build_subcomplex(W, SubcomplexSpec("M'", l))
            K = koszul(W).twisted(-l)
            self.assertTrue(M.check_dd() and Mq.check_dd())
            for d in range(-3, 12):
                total = sum(M.dim(p, d) for p in M.terms) + sum(Mq.dim(p, d) for p in Mq.terms)
                self.assertEqual(total, sum(K.dim(p, d) for p in K.terms))
                self.assertEqual(M.euler_characteristic(d) - Mq.euler_characteristic(d), K.euler_characteristic(d))

    def test_n_quotient_complements(self):
        for l in range(-3, 0):
            N = build_subcomplex(W, SubcomplexSpec('N', l))
            Nq = build_subcomplex(W, SubcomplexSpec("N'", l))
            K = koszul(W).twisted(-l)
            self.assertEqual(len(N.term_multiset()) + len(Nq.term_multiset()), len(K.term_multiset()))
            self.assertTrue(N.check_dd() and Nq.check_dd())

    def test_dual_of_m_matches_quotient_terms(self):
        n = W.n
        for l in range(-6, 1):
            D = dualize(build_subcomplex(W, SubcomplexSpec('M', l)), 0)
            Q = build_subcomplex(W, SubcomplexSpec("M'", 1 - W.total - l)).twisted(1).shift(-n)
            self.assertEqual(D.term_multiset(), Q.term_multiset(), l)

class TestSyzygies(unittest.TestCase):
    def test_top_syzygy_is_free(self):
        P, emb = syzygy_presentation(W, 3)
        self.assertEqual(list(P.generators.twists), [7])
        self.assertEqual(P.relations.source.rank, 0)

    def test_first_syzygy(self):
        P, emb = syzygy_presentation(W, 1)
        self.assertEqual(sorted(P.generators.twists), [2, 3, 3, 4, 4, 5])
        self.assertEqual(sorted(P.relations.source.twists), [4, 5, 6, 6])
        self.assertTrue(verify_syzygy_image(W, 1, range(0, 11)).passed)

    def test_generic_rank(self):
        for j in range(1, W.n + 1):
            _, emb = syzygy_presentation(W, j)
            self.assertEqual(generic_rank(emb), comb(W.n, j))

    def test_out_of_range(self):
        with self.assertRaises(WindowError):
            syzygy_presentation(W, 4)

if __name__ == '__main__':
    unittest.main()
