"""
Sheaf cohomology on weighted projective space.

Closed forms for line bundles and twisted differentials, a brute-force h^0
oracle through Koszul kernels, Euler characteristics of complexes of line
bundles, exact hypercohomology of sums of line bundles tensored with M_(l) or
N_(l), and cohomology of arbitrary finitely generated graded modules through
a free resolution and graded local duality.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence

from common import (CLOSED_FORM, RESOLVED, USER_SUPPLIED,
                    FieldSpec, InconsistentInvariantsError, ToolkitError, WindowError, info)
from gla import Presentation, degree_piece, free_resolution, rank
from koszul import SubcomplexSpec, TwistedComplex, build_subcomplex, dualize, koszul
from ring import Weights, hilbert_p

def _delta(a: int, b: int) -> int:
    return 1 if a == b else 0

def subset_sums(w: Weights) -> list[tuple[int, int]]:
    """(|I|, |w_I|) over all subsets I."""
    out = [(0, 0)]
    for x in w:
        out += [(k + 1, s + x) for k, s in out]
    return out

def h_line(w: Weights, i: int, m: int) -> int:
    n = w.n
    if not 0 <= i <= n:
        raise WindowError(f"cohomological degree {i} outside 0..{n}")
    if i == 0:
        return hilbert_p(w, m)
    if i == n:
        return hilbert_p(w, -m - w.total)
    return 0

def chi_line(w: Weights, m: int) -> int:
    return hilbert_p(w, m) + (-1) ** w.n * hilbert_p(w, -m - w.total)

def h0_omega(w: Weights, j: int, l: int) -> int:
    """Signed sum over |I| <= j."""
    if j < 0 or j > w.n:
        return 0
    total = sum((-1) ** (j - k) * hilbert_p(w, l - s) for k, s in subset_sums(w) if k <= j)
    return total - (-1) ** j * _delta(l, 0) * (1 - _delta(j, 0))

def h0_omega_complement(w: Weights, j: int, l: int) -> int:
    """The same value as a signed sum over |I| > j."""
    if j < 0 or j > w.n:
        return 0
    total = sum((-1) ** (j + 1 - k) * hilbert_p(w, l - s) for k, s in subset_sums(w) if k > j)
    return total + (-1) ** j * _delta(l, 0) * _delta(j, 0)

def h_omega(w: Weights, i: int, j: int, l: int) -> int:
    """h^i(Omega^j(l)); zero when Omega^j vanishes (j < 0 or j > n)."""
    n = w.n
    if not 0 <= i <= n:
        raise WindowError(f"cohomological degree {i} outside 0..{n}")
    if j < 0 or j > n:
        return 0
    if 0 < i < n:
        return _delta(i, j) * _delta(l, 0)
    if i == 0:
        return h0_omega(w, j, l)
    return h0_omega(w, n - j, -l)

def chi_omega(w: Weights, j: int, l: int) -> int:
    return sum((-1) ** i * h_omega(w, i, j, l) for i in range(w.n + 1))

def verify_mondimfor(w: Weights, l: int) -> bool:
    return sum((-1) ** k * hilbert_p(w, l - s) for k, s in subset_sums(w)) == _delta(l, 0)

def chi_line_complex(C: TwistedComplex, extra_twist: int = 0, sections_only: bool = False) -> int:
    """Euler characteristic of the sheafified C(extra_twist).

    With sections_only the alternating sum of h^0 alone is returned; for the
    Koszul complex that is the sum of the subset-sum identity, delta_{l,0}.
    """
    w = C.weights
    total = 0
    for p, T in C.terms.items():
        sign = -1 if p % 2 else 1
        for a in T.twists:
            m = extra_twist - a
            total += sign * (hilbert_p(w, m) if sections_only else chi_line(w, m))
    return total

def h0_oracle_omega(w: Weights, j: int, l: int, field_spec: Optional[FieldSpec] = None) -> int:
    """dim (Syz^j)_l as the kernel of the Koszul differential d^{-j} in degree l."""
    if not 0 <= j <= w.n:
        raise WindowError(f"Omega^{j} needs 0 <= j <= {w.n}")
    K = koszul(w, field_spec)
    dim = K.dim(-j, l)
    if j == 0 or dim == 0:
        return dim
    return dim - rank(K.ring.field, degree_piece(K.diffs[-j], l))

def ext_dim_bound(w: Weights, case: int, i: int, j: int = 0, l: int = 0, j2: int = 0, l2: int = 0) -> int:
    """Upper bound (exact for cases 1-3) for the Ext group named by `case`.

    1: Ext^i(O(l), O(l2))         = h^i(O(l2 - l))
    2: Ext^i(O(l), Omega^j(j))    = h^i(Omega^j(j - l))
    3: Ext^i(Omega^j(j), O(l))    = h^i(Omega^{n-j}(|w| + l - j))
    4, 5: Ext^i(Omega^j(l), Omega^j2(j2)), bounded through
          0 -> Omega^j(l) -> sum_{|I|=j} O(l - |w_I|) -> Omega^{j-1}(l) -> 0
    """
    n = w.n
    if i < 0:
        raise WindowError('Ext index must be non-negative')
    if i > n:
        return 0
    if case == 1:
        return h_line(w, i, l2 - l)
    if case == 2:
        return h_omega(w, i, j, j - l)
    if case == 3:
        return h_omega(w, i, n - j, w.total + l - j)
    if case in (4, 5):
        return _ext_omega_bound(w, i, j, l, j2)
    raise ToolkitError(f"unknown Ext vanishing case {case}")

def _ext_omega_bound(w: Weights, i: int, j: int, l: int, j2: int) -> int:
    if i > w.n or j < 0 or j > w.n:
        return 0
    if j == 0:
        return h_omega(w, i, j2, j2 - l)
    free = sum(h_omega(w, i, j2, j2 - l + s) for k, s in subset_sums(w) if k == j)
    return free + _ext_omega_bound(w, i + 1, j - 1, l, j2)

def ext_vanishing(w: Weights, case: int, i: int, **params) -> bool:
    return ext_dim_bound(w, case, i, **params) == 0

class ModuleCohomology:
    """h^i of the sheaf of a presented graded module, through graded local duality.

    For 1 <= i <= n, h^i(M~(l)) = dim Ext^{n-i}(M, P(-|w|))_{-l}; h^0 is
    dim M_l corrected by Ext^{n+1} and Ext^n in degree -l. The Ext groups
    are the cohomology of the resolution dualized into P(-|w|).
    """

    def __init__(self, P: Presentation, bound: Optional[int] = None):
        self.P = P
        self.ring = P.ring
        self.maps, self.certified = free_resolution(P, bound)
        w = self.ring.weights
        terms = [P.generators] + [M.source for M in self.maps]
        self.dual_terms = [T.dual(w.total) for T in terms]
        self.dual_maps = [M.dual(w.total) for M in self.maps]

    def ext_dim(self, k: int, e: int) -> int:
        if k < 0 or k >= len(self.dual_terms):
            return 0
        F = self.ring.field
        dim = self.dual_terms[k].dim(e)
        if dim == 0:
            return 0
        out = rank(F, degree_piece(self.dual_maps[k], e)) if k < len(self.dual_maps) else 0
        inc = rank(F, degree_piece(self.dual_maps[k - 1], e)) if k >= 1 else 0
        return dim - out - inc

    def module_dim(self, l: int) -> int:
        dim = self.P.generators.dim(l)
        if not self.maps or dim == 0:
            return dim
        return dim - rank(self.ring.field, degree_piece(self.maps[0], l))

    def h(self, i: int, l: int) -> int:
        n = self.ring.weights.n
        if not 0 <= i <= n:
            raise WindowError(f"cohomological degree {i} outside 0..{n}")
        if i >= 1:
            return self.ext_dim(n - i, -l)
        return self.module_dim(l) - self.ext_dim(n + 1, -l) + self.ext_dim(n, -l)

def sheaf_cohomology_module(M: Presentation, i: int, l: int, bound: Optional[int] = None) -> int:
    mc = ModuleCohomology(M, bound)
    if not mc.certified:
        info(f"warning: resolution not stabilized within bound {bound}; h^{i}({l}) is not certified")
    return mc.h(i, l)

def _complex_for(w: Weights, kind: str, l: int, field_spec: Optional[FieldSpec]) -> TwistedComplex:
    return build_subcomplex(w, SubcomplexSpec(kind, l), field_spec)

def _row_cohomology(C: TwistedComplex, d: int) -> dict[int, int]:
    """Cohomology of the degree-d piece of C, by position."""
    F = C.ring.field
    ranks = {p: rank(F, degree_piece(M, d)) for p, M in C.diffs.items()}
    return {p: C.dim(p, d) - ranks.get(p, 0) - ranks.get(p - 1, 0) for p in C.positions()}

def hyper_line(w: Weights, summands: Sequence[int], kind: str, l: int, i: int,
               field_spec: Optional[FieldSpec] = None) -> int:
    """h^i(F (x) M_(l)) or h^i(F (x) N_(l)) for F = sum of O(m), m in summands.

    The terms only carry H^0 and H^n and sit in positions -n..0, so the
    spectral sequence degenerates at E_2: H^i = row0[i] + row_n[i - n].
    Row 0 is the cohomology of global sections; row n is read from the dual
    complex through h^n(O(k)) = p_{-k-|w|}.
    """
    C = _complex_for(w, kind, l, field_spec)
    n = w.n
    D = dualize(C, 0)
    total = 0
    for m in summands:
        total += _row_cohomology(C, m).get(i, 0)
        if n > 0:
            total += _row_cohomology(D, -m - w.total).get(n - i, 0)
    return total

@dataclass
class CohomologyTable:
    """h^i(F(l)) over a window of twists, with optional hM, hN and a provenance per entry."""
    weights: Weights
    window: tuple[int, int]
    h: dict[tuple[int, int], int] = field(default_factory=dict)
    hM: dict[tuple[int, int], int] = field(default_factory=dict)
    hN: dict[tuple[int, int], int] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)
    label: str = ''

    def __post_init__(self):
        for table in (self.h, self.hM, self.hN):
            for key, value in table.items():
                if value < 0:
                    raise InconsistentInvariantsError(f"negative cohomology value at {key}")

    def set(self, table: str, i: int, l: int, value: int, provenance: str):
        if value < 0:
            raise InconsistentInvariantsError(f"negative cohomology value {table}({i},{l})")
        getattr(self, table)[(i, l)] = value
        self.provenance[f'{table}:{i}:{l}'] = provenance

    def get(self, table: str, i: int, l: int) -> Optional[int]:
        return getattr(self, table).get((i, l))

    def to_json(self) -> dict:
        def dump(name):
            return {f'{i},{l}': {'value': v, 'provenance': self.provenance.get(f'{name}:{i}:{l}')}
                    for (i, l), v in sorted(getattr(self, name).items())}
        return {'label': self.label, 'weights': list(self.weights), 'window': list(self.window),
                'h': dump('h'), 'hM': dump('hM'), 'hN': dump('hN')}

def line_bundle_table(w: Weights, summands: Sequence[int], window: tuple[int, int],
                      field_spec: Optional[FieldSpec] = None, extended: bool = True) -> CohomologyTable:
    """Closed-form h plus resolved hM / hN for F = sum of O(m)."""
    n = w.n
    lo, hi = window
    table = CohomologyTable(w, window, label='+'.join(f'O({m})' for m in summands))
    for l in range(lo, hi + 1):
        for i in range(n + 1):
            table.set('h', i, l, sum(h_line(w, i, m + l) for m in summands), CLOSED_FORM)
    if extended:
        for l in range(max(lo, 1 - w.total), min(hi, 0) + 1):
            for i in range(-n, n + 1):
                table.set('hM', i, l, hyper_line(w, summands, 'M', l, i, field_spec), RESOLVED)
        for l in range(max(lo, n - w.total + 1), min(hi, -1) + 1):
            for i in range(-n, n + 1):
                table.set('hN', i, l, hyper_line(w, summands, 'N', l, i, field_spec), RESOLVED)
    return table

def omega_table(w: Weights, j: int, shift: int, window: tuple[int, int]) -> CohomologyTable:
    """h^i(Omega^j(shift + l)) from the closed forms."""
    lo, hi = window
    table = CohomologyTable(w, window, label=f'Omega^{j}({shift})')
    for l in range(lo, hi + 1):
        for i in range(w.n + 1):
            table.set('h', i, l, h_omega(w, i, j, shift + l), CLOSED_FORM)
    return table

def user_table(w: Weights, window: tuple[int, int], values: dict, label: str = 'user',
               provenance: str = USER_SUPPLIED) -> CohomologyTable:
    """values maps 'h'/'hM'/'hN' to {(i, l): value}."""
    table = CohomologyTable(w, window, label=label)
    for name, entries in values.items():
        for (i, l), v in entries.items():
            table.set(name, i, l, int(v), provenance)
    return table

def cohomology_table(w: Weights, F, window: tuple[int, int], field_spec: Optional[FieldSpec] = None) -> CohomologyTable:
    """F is a list of line-bundle twists, ('omega', j, shift), or a dict of user-supplied values."""
    if isinstance(F, dict):
        return user_table(w, window, F)
    if isinstance(F, tuple) and F and F[0] == 'omega':
        return omega_table(w, F[1], F[2], window)
    return line_bundle_table(w, list(F), window, field_spec)

def chi_twisted(table: CohomologyTable, l: int) -> Optional[int]:
    values = [table.get('h', i, l) for i in range(table.weights.n + 1)]
    if any(v is None for v in values):
        return None
    return sum((-1) ** i * v for i, v in enumerate(values))

def plurigenus(inv, m: int) -> int:
    """h^0(mK) of a minimal surface of general type."""
    if m < 0:
        raise ToolkitError('plurigenera are defined for m >= 0')
    if m == 0:
        return 1
    if m == 1:
        return inv.pg
    return inv.chi + m * (m - 1) // 2 * inv.K2

def det_degree(inv, w: Weights, deg_phi: int = 1) -> int:
    """Weighted degree of the equation of the image: K^2 * prod(w) / deg(phi)."""
    prod = 1
    for x in w:
        prod *= x
    num = inv.K2 * prod
    if num % deg_phi:
        raise InconsistentInvariantsError(f"K^2 * prod(w) = {num} is not divisible by deg(phi) = {deg_phi}")
    return num // deg_phi

import unittest
from types import SimpleNamespace
from hypothesis import given, settings, strategies as st

from gla import GradedFree, GradedMatrix
from koszul import syzygy_presentation

W = Weights((1, 1, 2, 3))
WEIGHTS = [Weights(w) for w in [(1, 1, 1, 1), (1, 1, 2, 3), (1, 2, 3), (2, 3, 5)]]

class TestClosedForms(unittest.TestCase):
    def test_line_bundles(self):
        self.assertEqual(h_line(W, 0, 2), 4)
        self.assertEqual(h_line(W, 1, 5), 0)
        self.assertEqual(h_line(W, 3, -8), 2)
        with self.assertRaises(WindowError):
            h_line(W, 4, 0)

    def test_omega_values(self):
        for i in (1, 2):
            for j in range(4):
                self.assertEqual(h_omega(W, i, j, 0), 1 if i == j else 0)
        self.assertEqual(h_omega(W, 0, 1, 1), 0)
        self.assertEqual(h_omega(W, 0, 1, 2), 1)

    def test_vanishing_corollary(self):
        for w in WEIGHTS:
            n = w.n
            for j in range(n + 1):
                for l in range(-8, j):
                    self.assertEqual(h_omega(w, 0, j, l), 0)
                if 0 < j < n:
                    self.assertEqual(h_omega(w, 0, j, j), 0)
                    self.assertEqual(h_omega(w, n, j, j - n), 0)

    def test_two_h0_formulas_agree(self):
        for w in WEIGHTS:
            for j in range(w.n + 1):
                for l in range(-12, 13):
                    self.assertEqual(h0_omega(w, j, l), h0_omega_complement(w, j, l))

    def test_serre_symmetry(self):
        for w in WEIGHTS:
            n = w.n
            for j in range(n + 1):
                for l in range(-10, 11):
                    self.assertEqual(h_omega(w, n, j, l), h_omega(w, 0, n - j, -l))

    def test_mondimfor(self):
        self.assertTrue(verify_mondimfor(W, 0))
        self.assertTrue(verify_mondimfor(W, -5))
        self.assertTrue(verify_mondimfor(Weights((2, 3)), 7))

    @given(st.lists(st.integers(1, 4), min_size=2, max_size=5), st.integers(-15, 25))
    @settings(max_examples=60, deadline=None)
    def test_mondimfor_property(self, w, l):
        self.assertTrue(verify_mondimfor(Weights(tuple(w)), l))

    def test_chi_matches_truncated_koszul(self):
        for w in WEIGHTS:
            sums = subset_sums(w)
            for j in range(w.n + 1):
                for l in range(-9, 10):
                    expected = sum((-1) ** (j - k) * chi_line(w, l - s) for k, s in sums if k <= j)
                    self.assertEqual(chi_omega(w, j, l), expected, (w, j, l))

class TestOracle(unittest.TestCase):
    def test_oracle_agrees_with_closed_form(self):
        for w in WEIGHTS:
            for j in range(w.n + 1):
                for l in range(-10, 11):
                    self.assertEqual(h0_oracle_omega(w, j, l), h_omega(w, 0, j, l), (w, j, l))

    def test_oracle_examples(self):
        self.assertEqual(h0_oracle_omega(W, 3, 7), 1)
        self.assertEqual(h0_oracle_omega(W, 1, 2), 1)
        self.assertEqual(h0_oracle_omega(W, 2, 1), 0)

class TestEuler(unittest.TestCase):
    def test_koszul(self):
        K = koszul(W)
        for l in range(-8, 9):
            self.assertEqual(chi_line_complex(K, l), 0)
            self.assertEqual(chi_line_complex(K, l, sections_only=True), 1 if l == 0 else 0)

    def test_single_term(self):
        K = koszul(W)
        self.assertEqual(chi_line_complex(K.truncate_ge(0)), 1)

    def test_orthogonality_diagonal(self):
        M = build_subcomplex(W, SubcomplexSpec('M', -1))
        self.assertEqual(chi_line_complex(M, -1), 1)
        for j in range(-6, 1):
            for l in range(-6, 1):
                C = build_subcomplex(W, SubcomplexSpec('M', l))
                self.assertEqual(chi_line_complex(C, j), 1 if j == l else 0, (j, l))

class TestExtVanishing(unittest.TestCase):
    def test_guaranteed_ranges(self):
        for w in WEIGHTS:
            n = w.n
            for i in range(1, n + 1):
                for l in range(-10, 10):
                    for l2 in range(l - w.total + 1, l + 6):
                        self.assertTrue(ext_vanishing(w, 1, i, l=l, l2=l2))
                    for j in range(n + 1):
                        if l < i:
                            self.assertTrue(ext_vanishing(w, 2, i, j=j, l=l))
                        if l > n - w.total - i:
                            self.assertTrue(ext_vanishing(w, 3, i, j=j, l=l))
                        for j2 in range(n + 1):
                            if l < j + i:
                                self.assertTrue(ext_vanishing(w, 4, i, j=j, l=l, j2=j2), (w, i, j, l, j2))
                            if j2 < i < n - j:
                                self.assertTrue(ext_vanishing(w, 5, i, j=j, l=l, j2=j2), (w, i, j, l, j2))

    def test_boundary_is_evaluated(self):
        # outside the guaranteed range the bound is a number, not an assertion
        value = ext_dim_bound(W, 4, 1, j=1, l=2, j2=1)
        self.assertGreaterEqual(value, 0)
        self.assertGreater(ext_dim_bound(W, 1, 3, l=0, l2=-7), 0)

class TestModuleCohomology(unittest.TestCase):
    def test_free_module(self):
        P = Presentation.free(koszul(W).ring, (0,))
        mc = ModuleCohomology(P)
        for l in range(-12, 8):
            self.assertEqual(mc.h(0, l), hilbert_p(W, l))
            self.assertEqual(mc.h(3, l), h_line(W, 3, l))
            self.assertEqual(mc.h(1, l), 0)

    def test_residue_field_has_zero_sheaf(self):
        w = Weights((1, 2, 3))
        ring = koszul(w).ring
        src = GradedFree(w, tuple(w))
        row = GradedMatrix(ring, src, GradedFree(w, (0,)), [ring.gens()])
        mc = ModuleCohomology(Presentation(ring, GradedFree(w, (0,)), row))
        self.assertTrue(mc.certified)
        for i in range(w.n + 1):
            for l in range(-4, 5):
                self.assertEqual(mc.h(i, l), 0, (i, l))

    def test_syzygy_module_matches_omega(self):
        P, _ = syzygy_presentation(W, 1)
        mc = ModuleCohomology(P)
        self.assertEqual(mc.h(0, 2), 1)
        for l in range(-3, 6):
            for i in range(W.n + 1):
                self.assertEqual(mc.h(i, l), h_omega(W, i, 1, l), (i, l))

class TestHypercohomology(unittest.TestCase):
    def test_structure_sheaf_against_euler(self):
        # sum_i (-1)^i h^i(F (x) M_(l)) = chi(M_(l)(m)) = delta
        for l in range(-6, 1):
            for m in range(-3, 3):
                chi = sum((-1) ** i * hyper_line(W, [m], 'M', l, i) for i in range(4))
                self.assertEqual(chi, chi_line_complex(build_subcomplex(W, SubcomplexSpec('M', l)), m))

    def test_orthogonality_is_concentrated(self):
        for l in range(-6, 1):
            for j in range(-6, 1):
                values = [hyper_line(W, [j], 'M', l, i) for i in range(4)]
                self.assertEqual(values, [1 if j == l else 0, 0, 0, 0], (j, l))

    def test_n_window(self):
        for l in range(-3, 0):
            C = build_subcomplex(W, SubcomplexSpec('N', l))
            for m in (0, 2):
                chi = sum((-1) ** i * hyper_line(W, [m], 'N', l, i) for i in range(4))
                self.assertEqual(chi, chi_line_complex(C, m))

    def test_table(self):
        t = cohomology_table(W, [2], (-3, 0))
        self.assertEqual(t.get('h', 0, 0), 4)
        self.assertEqual(t.provenance['h:0:0'], CLOSED_FORM)
        self.assertEqual(t.provenance['hN:0:-1'], RESOLVED)
        self.assertIn('hM', t.to_json())
        with self.assertRaises(InconsistentInvariantsError):
            user_table(W, (0, 0), {'h': {(0, 0): -1}})

class TestInvariants(unittest.TestCase):
    def test_plurigenera_and_degree(self):
        inv = SimpleNamespace(chi=1, K2=4, pg=2, q=2)
        self.assertEqual([plurigenus(inv, m) for m in range(4)], [1, 2, 5, 13])
        self.assertEqual(det_degree(inv, W), 24)
        with self.assertRaises(InconsistentInvariantsError):
            det_degree(inv, W, 5)

if __name__ == '__main__':
    unittest.main()
