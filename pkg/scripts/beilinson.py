"""
Term multisets of the two minimal Beilinson-type resolutions of a graded
sheaf F on P(w):

    X^i = sum_{-|w| < j <= 0} O(j)^{h^i(F (x) M_(j))}
    Y^i = sum_{n-|w| < j < 0} O(j)^{h^i(F (x) N_(j))} + sum_{0 <= j <= n} Omega^j(j)^{h^{i+j}(F(-j))}

plus the coefficient bookkeeping of the symmetric resolution

    0 -> (O + E)^v(-1-|w|) -> O + E -> phi_* O_S -> 0

of a surface mapped to a weighted projective 3-space.
"""
from collections import Counter
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Optional

from common import (CLOSED_FORM, PAPER_SUPPLIED, CheckResult, FieldSpec,
                    InconsistentInvariantsError, NotSplitError, ToolkitError,
                    WindowError, check, info)
from cohom import CohomologyTable, chi_line_complex, det_degree, hyper_line, plurigenus, subset_sums
from koszul import SubcomplexSpec, build_subcomplex
from ring import Weights, hilbert_p

@dataclass(frozen=True)
class SheafKind:
    """O(twist), or Omega^j(twist) for 0 < j < n.

    Use the constructors: Omega^0(t) is O(t) and Omega^n(t) is O(t - |w|).
    """
    kind: str
    j: int
    twist: int

    @classmethod
    def line(cls, twist: int) -> 'SheafKind':
        return cls('O', 0, twist)

    @classmethod
    def omega(cls, w: Weights, j: int, twist: int) -> 'SheafKind':
        if not 0 <= j <= w.n:
            raise WindowError(f"Omega^{j} needs 0 <= j <= {w.n}")
        if j == 0:
            return cls.line(twist)
        if j == w.n:
            return cls.line(twist - w.total)
        return cls('Omega', j, twist)

    @property
    def is_line(self) -> bool:
        return self.kind == 'O'

    def rank(self, w: Weights) -> int:
        return 1 if self.is_line else comb(w.n, self.j)

    def first_chern(self, w: Weights) -> int:
        if self.is_line:
            return self.twist
        return -comb(w.n - 1, self.j - 1) * w.total + comb(w.n, self.j) * self.twist

    def dual(self, w: Weights, shift: int = 0) -> 'SheafKind':
        """Hom(self, O(shift)); Omega^j dualizes to Omega^{n-j}(|w|)."""
        if self.is_line:
            return SheafKind.line(shift - self.twist)
        return SheafKind.omega(w, w.n - self.j, w.total - self.twist + shift)

    def sort_key(self):
        return (self.is_line, -self.j, -self.twist)

    def __str__(self):
        if self.is_line:
            return f'O({self.twist})'
        return f'Omega^{self.j}({self.twist})'

def _render_sum(summands: Counter, multiplicity_one: bool = True) -> str:
    parts = []
    for s in sorted(summands, key=SheafKind.sort_key):
        m = summands[s]
        parts.append(f'{s}^{m}' if multiplicity_one or m != 1 else str(s))
    return ' + '.join(parts) if parts else '0'

@dataclass
class ResolutionTerms:
    """position -> multiset of sheaves, with the provenance of every multiplicity."""
    name: str
    terms: dict[int, Counter] = field(default_factory=dict)
    provenance: dict[tuple[int, SheafKind], str] = field(default_factory=dict)

    def add(self, p: int, sheaf: SheafKind, mult: int, provenance: Optional[str] = None):
        if mult < 0:
            raise InconsistentInvariantsError(f"negative multiplicity {mult} for {sheaf} in {self.name}^{p}")
        if mult == 0:
            return
        self.terms.setdefault(p, Counter())[sheaf] += mult
        if provenance is not None:
            self.provenance[(p, sheaf)] = provenance

    def positions(self) -> list[int]:
        return sorted(self.terms)

    def multiplicity(self, p: int, sheaf: SheafKind) -> int:
        return self.terms.get(p, Counter())[sheaf]

    def same_terms(self, other: 'ResolutionTerms') -> bool:
        return self.terms == other.terms

    def dual(self, w: Weights, shift: int, reflect: int = 0) -> 'ResolutionTerms':
        """Termwise Hom(-, O(shift)), the term at p moving to reflect - p."""
        out = ResolutionTerms(f'{self.name}^v({shift})')
        for p, summands in self.terms.items():
            for s, m in summands.items():
                out.add(reflect - p, s.dual(w, shift), m, self.provenance.get((p, s)))
        return out

    def euler_rank(self, w: Weights) -> int:
        return sum((-1) ** (p % 2) * m * s.rank(w) for p, c in self.terms.items() for s, m in c.items())

    def render(self) -> list[str]:
        return [f'{self.name}^{p} = {_render_sum(self.terms[p])}' for p in self.positions()]

    def __str__(self):
        return '\n'.join(self.render())

    def to_json(self) -> dict:
        return {'name': self.name,
                'positions': {str(p): [{'sheaf': str(s), 'multiplicity': self.terms[p][s],
                                        'provenance': self.provenance.get((p, s))}
                                       for s in sorted(self.terms[p], key=SheafKind.sort_key)]
                              for p in self.positions()}}

def beilinson_window(w: Weights) -> tuple[int, int]:
    """Twists a cohomology table must cover for both x_terms and y_terms."""
    return (1 - w.total, 0)

def _require(table: CohomologyTable, name: str, i: int, l: int) -> int:
    value = table.get(name, i, l)
    if value is None:
        raise WindowError(f"table {table.label!r} lacks {name}({i}, {l})")
    return value

def x_terms(w: Weights, table: CohomologyTable) -> ResolutionTerms:
    n = w.n
    X = ResolutionTerms('X')
    for j in range(1 - w.total, 1):
        for i in range(-n, n + 1):
            X.add(i, SheafKind.line(j), _require(table, 'hM', i, j), table.provenance.get(f'hM:{i}:{j}'))
    return X

def y_terms(w: Weights, table: CohomologyTable) -> ResolutionTerms:
    n = w.n
    Y = ResolutionTerms('Y')
    for j in range(n - w.total + 1, 0):
        for i in range(-n, n + 1):
            Y.add(i, SheafKind.line(j), _require(table, 'hN', i, j), table.provenance.get(f'hN:{i}:{j}'))
    for j in range(n + 1):
        E = SheafKind.omega(w, j, j)
        for k in range(n + 1):
            # Omega^j(j) in position k - j carries h^k(F(-j))
            Y.add(k - j, E, _require(table, 'h', k, -j), table.provenance.get(f'h:{k}:{-j}'))
    return Y

def z_coeffs(w: Weights, j: int) -> tuple[int, int]:
    """(z^{-1}_j, z^0_j): the O(j) coefficients of the Y-resolution of O(2)."""
    SubcomplexSpec('N', j).check_window(w)
    z_zero = sum(1 for x in w if x == 2 - j)
    big = [x for x in w if x > 1]
    z_minus1 = sum(1 for a in range(len(big)) for b in range(a + 1, len(big)) if big[a] + big[b] == 2 - j)
    return z_minus1, z_zero

def z_coeffs_table(w: Weights) -> dict[int, tuple[int, int]]:
    return {j: z_coeffs(w, j) for j in range(w.n - w.total + 1, 0)}

def o2_resolution(w: Weights) -> ResolutionTerms:
    """Closed form of Y(O(2)): Omega^2(2) -> Omega^1(1)^{p_1} + O(j)^{z^-1_j} -> O^{p_2} + O(j)^{z^0_j}."""
    if w.n < 2:
        raise WindowError(f"the O(2) resolution needs n >= 2, got n = {w.n}")
    Y = ResolutionTerms('Y')
    Y.add(-2, SheafKind.omega(w, 2, 2), 1, CLOSED_FORM)
    Y.add(-1, SheafKind.omega(w, 1, 1), hilbert_p(w, 1), CLOSED_FORM)
    Y.add(0, SheafKind.line(0), hilbert_p(w, 2), CLOSED_FORM)
    for j, (z_minus1, z_zero) in z_coeffs_table(w).items():
        Y.add(-1, SheafKind.line(j), z_minus1, CLOSED_FORM)
        Y.add(0, SheafKind.line(j), z_zero, CLOSED_FORM)
    return Y

def weight_reduction(w: Weights) -> Weights:
    """The weights > 1; N-coefficients of O(d) may be computed over them instead.

    Empty when every weight is 1 (there is no N-window then).
    """
    return Weights(tuple(x for x in w if x > 1))

def _generator_expansion(w: Weights, j: int) -> list[tuple[int, int]]:
    """E_(j) as a signed sum of line bundles: O(j) in the N-window, the truncated Koszul complex for Omega^j(j)."""
    if w.n - w.total < j < 0:
        return [(1, j)]
    if 0 <= j <= w.n:
        return [((-1) ** (j - k), j - s) for k, s in subset_sums(w) if k <= j]
    raise WindowError(f"no generator E_({j}) on P({w})")

def orthogonality_check(w: Weights, kind: str, l: int, j: int, field_spec: Optional[FieldSpec] = None) -> int:
    """chi(M_(l)(j)) or chi(N_(l) (x) E_(j)); both equal delta_{j,l}.

    For N, 0 <= l <= n stands for O(-l)[l].
    """
    if kind == 'M':
        SubcomplexSpec('M', j).check_window(w)
        return chi_line_complex(build_subcomplex(w, SubcomplexSpec('M', l), field_spec), j)
    if kind != 'N':
        raise ToolkitError(f"orthogonality is defined for M and N, got {kind!r}")
    sub = 'trivialN' if 0 <= l <= w.n else 'N'
    C = build_subcomplex(w, SubcomplexSpec(sub, l), field_spec)
    return sum(sign * chi_line_complex(C, t) for sign, t in _generator_expansion(w, j))

def orthogonality_table(w: Weights, kind: str, field_spec: Optional[FieldSpec] = None) -> CheckResult:
    if kind == 'M':
        window = list(range(1 - w.total, 1))
    else:
        window = list(range(w.n - w.total + 1, w.n + 1))
    bad = [(l, j, v) for l in window for j in window
           if (v := orthogonality_check(w, kind, l, j, field_spec)) != (1 if j == l else 0)]
    return check(f'orthogonality_{kind}', not bad, CLOSED_FORM, str(bad[:3]) if bad else None,
                 weights=list(w), window=[window[0], window[-1]])

def weight_reduction_check(w: Weights, summands: list[int], field_spec: Optional[FieldSpec] = None) -> CheckResult:
    """h^i(F (x) N_(j)) agrees over w and over its weights > 1."""
    reduced = weight_reduction(w)
    if not reduced:
        return CheckResult('weight_reduction', 'skipped', CLOSED_FORM, {'weights': list(w)})
    bad = []
    for j in range(w.n - w.total + 1, 0):
        for i in range(-w.n, w.n + 1):
            full = hyper_line(w, summands, 'N', j, i, field_spec)
            small = hyper_line(reduced, summands, 'N', j, i, field_spec)
            if full != small:
                bad.append((i, j, full, small))
    return check('weight_reduction', not bad, witness=str(bad[:3]) if bad else None,
                 weights=list(w), reduced=list(reduced), summands=list(summands))

@dataclass(frozen=True)
class InvariantData:
    pg: int
    q: int
    K2: int
    chi: int

    def __post_init__(self):
        if min(self.pg, self.q, self.K2, self.chi) < 0:
            raise InconsistentInvariantsError(f"invariants must be non-negative: {self}")
        if self.chi != 1 + self.pg - self.q:
            raise InconsistentInvariantsError(f"chi = {self.chi} but 1 + p_g - q = {1 + self.pg - self.q}")

    def chi_multiple(self, m: int) -> int:
        """chi(mK) by Riemann-Roch."""
        return self.chi + m * (m - 1) // 2 * self.K2

    def h(self, i: int, m: int) -> int:
        """h^i(S, mK) of a minimal surface of general type."""
        if i == 0:
            return plurigenus(self, m) if m >= 0 else 0
        if i == 1:
            return self.q if m in (0, 1) else 0
        if i == 2:
            return self.h(0, 1 - m)
        return 0

    def to_json(self) -> dict:
        return {'pg': self.pg, 'q': self.q, 'K2': self.K2, 'chi': self.chi}

@dataclass(frozen=True)
class FresCorrection:
    """The one case where c_j may drop by 1: |w| = 2 w_i - 1, j = 2 - w_i, k_j = 1."""
    possible: bool
    applies_to: Optional[int]
    k: Optional[int] = None
    undecided_condition: Optional[str] = None

    def to_json(self) -> dict:
        return {'possible': self.possible, 'applies_to': self.applies_to, 'k': self.k,
                'undecided_condition': self.undecided_condition}

COMPOSITE_CONDITION = 'the comparison morphism composed with its shifted dual is nonzero'

def fres_correction(w: Weights, j: Optional[int] = None, k: Optional[int] = None) -> FresCorrection:
    hits = sorted({2 - x for x in w if w.total == 2 * x - 1})
    applies_to = hits[0] if hits else None
    possible = applies_to is not None and (j is None or j == applies_to) and k != 0
    if not possible:
        return FresCorrection(False, applies_to, k)
    condition = COMPOSITE_CONDITION if k == 1 else f'k_{applies_to} = 1 and {COMPOSITE_CONDITION}'
    return FresCorrection(True, applies_to, k, condition)

def _check_threefold(w: Weights):
    if w.n != 3:
        raise WindowError(f"surface coefficients live on a weighted projective 3-space, got n = {w.n}")

def coefficient_window(w: Weights) -> list[int]:
    return list(range(4 - w.total, 0))

@dataclass
class CoeffVector:
    """c_j for 3-|w| < j < 0 with the k_j and y_j they came from."""
    c: dict[int, int]
    k: dict[int, int] = field(default_factory=dict)
    y: dict[int, int] = field(default_factory=dict)
    correction: Optional[FresCorrection] = None

    def __post_init__(self):
        for j, v in self.c.items():
            if v < 0:
                raise InconsistentInvariantsError(f"c_{j} = {v} is negative")

    def get(self, j: int) -> int:
        return self.c.get(j, 0)

    def to_json(self) -> dict:
        return {'c': {str(j): v for j, v in sorted(self.c.items())},
                'k': {str(j): v for j, v in sorted(self.k.items())},
                'y': {str(j): v for j, v in sorted(self.y.items())},
                'correction': self.correction.to_json() if self.correction else None}

def compute_coeffs(w: Weights, y: dict[int, int], k: Optional[dict[int, int]] = None,
                   composite_nonzero: Optional[bool] = None) -> CoeffVector:
    """c_j = y_j - z^0_j - z^{-1}_{j'} + k_j + k_{j'}, j' = 3 - |w| - j."""
    _check_threefold(w)
    k = dict(k or {})
    window = coefficient_window(w)
    missing = [j for j in window if j not in y]
    if missing:
        raise WindowError(f"y_j missing for j in {missing}")
    c = {}
    for j in window:
        jj = 3 - w.total - j
        c[j] = y[j] - z_coeffs(w, j)[1] - z_coeffs(w, jj)[0] + k.get(j, 0) + k.get(jj, 0)
    correction = fres_correction(w)
    if correction.possible:
        j = correction.applies_to
        correction = fres_correction(w, j, k.get(j))
        if correction.possible and correction.k == 1:
            if composite_nonzero:
                c[j] -= 1
            elif composite_nonzero is None:
                info(f"warning: c_{j} may be one less ({correction.undecided_condition})")
    return CoeffVector(c, k, dict(y), correction)

def coeff_difference(w: Weights, inv: InvariantData, j: int, field_spec: Optional[FieldSpec] = None) -> int:
    """c_j - c_{3-|w|-j} from the numerical invariants alone.

    chi(F(2) (x) N_(j)) - chi(N_(j)(2)) + chi(N_(3-|w|-j)(2)) with F = phi_* O_S.
    """
    _check_threefold(w)
    if not 3 - w.total < j < 0:
        raise WindowError(f"j = {j} outside {3 - w.total} < j < 0")
    C = build_subcomplex(w, SubcomplexSpec('N', j), field_spec)
    D = build_subcomplex(w, SubcomplexSpec('N', 3 - w.total - j), field_spec)
    pushed = sum((-1) ** (p % 2) * inv.chi_multiple(2 - a) for p, T in C.terms.items() for a in T.twists)
    return pushed - chi_line_complex(C, 2) + chi_line_complex(D, 2)

@dataclass
class Bundle:
    summands: Counter = field(default_factory=Counter)
    name: str = ''

    def add(self, sheaf: SheafKind, mult: int):
        if mult < 0:
            raise InconsistentInvariantsError(f"negative multiplicity {mult} for {sheaf} in {self.name}")
        if mult:
            self.summands[sheaf] += mult

    def rank(self, w: Weights) -> int:
        return sum(m * s.rank(w) for s, m in self.summands.items())

    def first_chern(self, w: Weights) -> int:
        return sum(m * s.first_chern(w) for s, m in self.summands.items())

    def __str__(self):
        return _render_sum(self.summands, multiplicity_one=False)

    def to_json(self) -> dict:
        return {'name': self.name,
                'summands': [{'sheaf': str(s), 'multiplicity': self.summands[s]}
                             for s in sorted(self.summands, key=SheafKind.sort_key)]}

def E_of_phi(w: Weights, inv: InvariantData, c: CoeffVector) -> Bundle:
    """O(-2)^{chi+K^2-p_2} + Omega^1(-1)^q + (Omega^2)^{p_g-p_1} + sum O(j-2)^{c_j}."""
    _check_threefold(w)
    p1, p2 = hilbert_p(w, 1), hilbert_p(w, 2)
    if inv.chi + inv.K2 < p2:
        raise InconsistentInvariantsError(f"chi + K^2 = {inv.chi + inv.K2} < p_2 = {p2}")
    if inv.pg < p1:
        raise InconsistentInvariantsError(f"p_g = {inv.pg} < p_1 = {p1}")
    E = Bundle(name='E')
    E.add(SheafKind.line(-2), inv.chi + inv.K2 - p2)
    E.add(SheafKind.omega(w, 1, -1), inv.q)
    E.add(SheafKind.omega(w, 2, 0), inv.pg - p1)
    for j in coefficient_window(w):
        E.add(SheafKind.line(j - 2), c.get(j))
    return E

def det_degree_of(w: Weights, E: Bundle) -> int:
    """Degree of det of a map (O + E)^v(-1-|w|) -> O + E."""
    r = 1 + E.rank(w)
    return 2 * E.first_chern(w) + r * (1 + w.total)

def det_degree_check(w: Weights, inv: InvariantData, E: Bundle) -> CheckResult:
    got, expected = det_degree_of(w, E), det_degree(inv, w)
    return check('det_degree', got == expected, CLOSED_FORM, f'{got} != {expected}',
                 rank=1 + E.rank(w), degree=got, expected=expected)

def infer_split_type(h0: Callable[[int], int], w: Weights, window: tuple[int, int]) -> list[int]:
    """Twists m of a sum of O(m) with the given h^0(F(l)), peeled from the lowest nonzero twist."""
    lo, hi = window
    residual = {l: int(h0(l)) for l in range(lo, hi + 1)}
    if residual.get(lo):
        raise WindowError(f"h^0 is already nonzero at the window start {lo}")
    twists = []
    while True:
        negative = [l for l, v in sorted(residual.items()) if v < 0]
        if negative:
            l = negative[0]
            raise NotSplitError(f"not split of line-bundle type on [{lo}, {hi}]: "
                                f"residual {residual[l]} at twist {l} after {twists}")
        nonzero = [l for l, v in sorted(residual.items()) if v]
        if not nonzero:
            return sorted(twists, reverse=True)
        k = nonzero[0]
        m = residual[k]
        twists += [-k] * m
        for l in residual:
            residual[l] -= m * hilbert_p(w, l - k)

def fsym_table(w: Weights, inv: InvariantData, y: Optional[dict[int, int]] = None,
               provenance: str = PAPER_SUPPLIED) -> CohomologyTable:
    """Cohomology of F = phi_* O_S(2): h^i(F(l)) = h^i(S, (l+2)K).

    hN is filled from y, with h^0(F (x) N_(j)) = y_j = h^{-1}(F (x) N_(3-|w|-j)).
    """
    _check_threefold(w)
    window = beilinson_window(w)
    table = CohomologyTable(w, window, label='phi_*O_S(2)')
    n = w.n
    for l in range(window[0], window[1] + 1):
        for i in range(n + 1):
            table.set('h', i, l, inv.h(i, l + 2), CLOSED_FORM)
    if y is not None:
        for j in coefficient_window(w):
            for i in range(-n, n + 1):
                if i == 0:
                    table.set('hN', i, j, y[j], provenance)
                elif i == -1:
                    table.set('hN', i, j, y[3 - w.total - j], provenance)
                else:
                    table.set('hN', i, j, 0, CLOSED_FORM)
    return table

def fbd_terms(w: Weights, inv: InvariantData, y: dict[int, int]) -> ResolutionTerms:
    return y_terms(w, fsym_table(w, inv, y))

def y_dual_symmetry_check(w: Weights, Y: ResolutionTerms) -> CheckResult:
    """Y^{-1-i} = (Y^i)^v(3-|w|) termwise."""
    D = Y.dual(w, 3 - w.total, -1)
    ok = D.same_terms(Y)
    witness = None
    if not ok:
        p = next(p for p in sorted(set(D.terms) | set(Y.terms)) if D.terms.get(p) != Y.terms.get(p))
        witness = f'position {p}: {_render_sum(Y.terms.get(p, Counter()))} vs dual {_render_sum(D.terms.get(p, Counter()))}'
    return check('y_dual_symmetry', ok, CLOSED_FORM, witness, weights=list(w))

import unittest
from hypothesis import given, settings, strategies as st

from cohom import h_omega, line_bundle_table, user_table

W = Weights((1, 1, 2, 3))
EXAMPLE = InvariantData(pg=2, q=2, K2=4, chi=1)

def O(t):
    return SheafKind.line(t)

def twist_counter(*twists):
    return Counter(O(t) for t in twists)

class TestSheafKind(unittest.TestCase):
    def test_normalization_and_render(self):
        self.assertEqual(SheafKind.omega(W, 0, 2), O(2))
        self.assertEqual(SheafKind.omega(W, 3, 3), O(-4))
        self.assertEqual(str(SheafKind.omega(W, 1, 1)), 'Omega^1(1)')
        with self.assertRaises(WindowError):
            SheafKind.omega(W, 4, 0)

    def test_duals(self):
        self.assertEqual(SheafKind.omega(W, 1, 1).dual(W, -4), SheafKind.omega(W, 2, 2))
        self.assertEqual(O(-1).dual(W, -4), O(-3))
        for j in (1, 2):
            E = SheafKind.omega(W, j, 5)
            self.assertEqual(E.dual(W, 3).dual(W, 3), E)

    def test_chern_data(self):
        Om = SheafKind.omega(W, 1, -1)
        self.assertEqual((Om.rank(W), Om.first_chern(W)), (3, -10))
        self.assertEqual(SheafKind.omega(W, 2, 0).first_chern(W), -14)

    def test_render_line(self):
        Y = ResolutionTerms('Y')
        Y.add(-1, SheafKind.omega(W, 1, 1), 2)
        Y.add(-1, O(-3), 1)
        self.assertEqual(Y.render(), ['Y^-1 = Omega^1(1)^2 + O(-3)^1'])
        self.assertIn('-1', Y.to_json()['positions'])

class TestTerms(unittest.TestCase):
    def test_x_terms_of_o1(self):
        table = line_bundle_table(W, [1], beilinson_window(W))
        X = x_terms(W, table)
        self.assertEqual(X.terms[0], twist_counter(0, 0, -1, -2))
        self.assertEqual(X.terms[-1], twist_counter(-1, -2, -2, -3, -3, -4))
        self.assertEqual(X.terms[-2], twist_counter(-3, -4, -5, -5))
        self.assertEqual(X.terms[-3], twist_counter(-6))
        self.assertEqual(X.positions(), [-3, -2, -1, 0])

    def test_trivial_x_terms(self):
        for t in (0, -1):
            X = x_terms(W, line_bundle_table(W, [t], beilinson_window(W)))
            self.assertEqual(X.terms, {0: twist_counter(t)})

    def test_y_terms_of_o2(self):
        Y = y_terms(W, line_bundle_table(W, [2], beilinson_window(W)))
        self.assertEqual(Y.terms[-2], Counter({SheafKind.omega(W, 2, 2): 1}))
        self.assertEqual(Y.terms[-1], Counter({SheafKind.omega(W, 1, 1): 2, O(-3): 1}))
        self.assertEqual(Y.terms[0], Counter({O(0): 4, O(-1): 1}))
        self.assertTrue(Y.same_terms(o2_resolution(W)))

    def test_o2_closed_form_matches_resolved(self):
        for w in [(1, 2, 3), (1, 1, 1, 2), (1, 1, 2, 2), (1, 2, 2, 3)]:
            w = Weights(w)
            Y = y_terms(w, line_bundle_table(w, [2], beilinson_window(w)))
            self.assertTrue(Y.same_terms(o2_resolution(w)), w)

    def test_trivial_y_terms(self):
        Y = y_terms(W, line_bundle_table(W, [0], beilinson_window(W)))
        self.assertEqual(Y.terms, {0: twist_counter(0)})

    def test_omega_generators_are_their_own_resolution(self):
        window = beilinson_window(W)
        for k in (1, 2):
            values = {'h': {(i, l): h_omega(W, i, k, k + l) for i in range(4) for l in range(window[0], 1)},
                      'hN': {(i, j): 0 for i in range(-3, 4) for j in range(-3, 0)}}
            Y = y_terms(W, user_table(W, window, values, label=f'Omega^{k}({k})', provenance=CLOSED_FORM))
            self.assertEqual(Y.terms, {0: Counter({SheafKind.omega(W, k, k): 1})})

    def test_missing_entries(self):
        with self.assertRaises(WindowError):
            y_terms(W, user_table(W, (0, 0), {'h': {(0, 0): 1}}))
        with self.assertRaises(WindowError):
            x_terms(W, line_bundle_table(W, [0], (-2, 0)))

class TestZCoefficients(unittest.TestCase):
    def test_values(self):
        self.assertEqual(z_coeffs(W, -1), (0, 1))
        self.assertEqual(z_coeffs(W, -3), (1, 0))
        self.assertEqual(z_coeffs(W, -2), (0, 0))
        with self.assertRaises(WindowError):
            z_coeffs(Weights((1, 1, 1, 1)), -1)

    def test_weight_reduction(self):
        self.assertEqual(weight_reduction(W), Weights((2, 3)))
        self.assertEqual(weight_reduction(Weights((1, 1, 1, 1))), Weights(()))
        self.assertEqual(len(weight_reduction(Weights((1, 1, 1, 1)))), 0)
        self.assertEqual(weight_reduction_check(Weights((1, 1, 1, 1)), [0]).status, 'skipped')
        self.assertEqual(weight_reduction(Weights((2, 2, 3))), Weights((2, 2, 3)))
        self.assertTrue(weight_reduction_check(W, [2]).passed)
        self.assertTrue(weight_reduction_check(Weights((1, 2, 3)), [2]).passed)

class TestOrthogonality(unittest.TestCase):
    def test_values(self):
        for l in range(-6, 1):
            self.assertEqual(orthogonality_check(W, 'M', l, l), 1)
        self.assertEqual(orthogonality_check(W, 'M', -2, -5), 0)
        self.assertEqual(orthogonality_check(W, 'M', 0, 0), 1)

    def test_tables(self):
        for w in [W, Weights((1, 2, 3)), Weights((1, 1, 1, 1))]:
            self.assertTrue(orthogonality_table(w, 'M').passed, w)
            self.assertTrue(orthogonality_table(w, 'N').passed, w)

class TestSymmetricResolution(unittest.TestCase):
    def test_invariants(self):
        with self.assertRaises(InconsistentInvariantsError):
            InvariantData(pg=2, q=2, K2=4, chi=2)
        self.assertEqual([EXAMPLE.h(i, 1) for i in range(3)], [2, 2, 1])
        self.assertEqual([EXAMPLE.h(i, -1) for i in range(3)], [0, 0, 5])

    def test_coeff_difference(self):
        self.assertEqual(coeff_difference(W, EXAMPLE, -1), 2)
        self.assertEqual(coeff_difference(W, EXAMPLE, -3), -2)
        self.assertEqual(coeff_difference(W, EXAMPLE, -2), 0)
        with self.assertRaises(WindowError):
            coeff_difference(W, EXAMPLE, -4)

    @given(st.integers(0, 6), st.integers(0, 4), st.integers(1, 30))
    @settings(max_examples=15, deadline=None)
    def test_coeff_difference_antisymmetric(self, pg, q, K2):
        inv = InvariantData(pg=pg + q, q=q, K2=K2, chi=1 + pg)
        for j in (-1, -2, -3):
            self.assertEqual(coeff_difference(W, inv, j), -coeff_difference(W, inv, -4 - j))

    def test_example_coefficients(self):
        c = compute_coeffs(W, {-1: 4, -2: 0, -3: 0}, {-1: 0})
        self.assertEqual(c.c, {-1: 2, -2: 0, -3: 0})
        self.assertEqual(c.c[-1] - c.c[-3], coeff_difference(W, EXAMPLE, -1))
        special = compute_coeffs(W, {-1: 4, -2: 1, -3: 0}, {-1: 1})
        self.assertEqual(special.c, {-1: 3, -2: 1, -3: 1})

    def test_e_of_phi(self):
        E = E_of_phi(W, EXAMPLE, CoeffVector({-1: 2, -2: 0, -3: 0}))
        self.assertEqual(E.summands, Counter({O(-2): 1, O(-3): 2, SheafKind.omega(W, 1, -1): 2}))
        self.assertEqual(str(E), 'Omega^1(-1)^2 + O(-2) + O(-3)^2')
        self.assertTrue(det_degree_check(W, EXAMPLE, E).passed)
        quintic = Weights((1, 1, 1, 1))
        inv = InvariantData(pg=4, q=0, K2=7, chi=5)
        E = E_of_phi(quintic, inv, CoeffVector({}))
        self.assertEqual(E.summands, Counter({O(-2): 2}))
        self.assertTrue(det_degree_check(quintic, inv, E).passed)
        with self.assertRaises(InconsistentInvariantsError):
            E_of_phi(quintic, InvariantData(pg=4, q=0, K2=4, chi=5), CoeffVector({}))

    def test_fres_correction(self):
        self.assertFalse(fres_correction(W).possible)
        w = Weights((1, 1, 2, 5))
        flag = fres_correction(w)
        self.assertTrue(flag.possible)
        self.assertEqual(flag.applies_to, -3)
        self.assertFalse(fres_correction(w, -3, 0).possible)
        self.assertEqual(fres_correction(w, -3, 1).undecided_condition, COMPOSITE_CONDITION)

    def test_fbd_complex(self):
        Y = fbd_terms(W, EXAMPLE, {-1: 4, -2: 0, -3: 0})
        self.assertEqual(Y.positions(), [-2, -1, 0, 1])
        self.assertEqual(Y.terms[-2], Counter({SheafKind.omega(W, 2, 2): 1}))
        self.assertEqual(Y.terms[1], Counter({SheafKind.omega(W, 1, 1): 1}))
        self.assertEqual(Y.terms[0], Counter({O(0): 5, SheafKind.omega(W, 1, 1): 2,
                                              SheafKind.omega(W, 2, 2): 2, O(-1): 4}))
        self.assertEqual(Y.terms[-1], Counter({O(-4): 5, SheafKind.omega(W, 2, 2): 2,
                                               SheafKind.omega(W, 1, 1): 2, O(-3): 4}))
        self.assertTrue(y_dual_symmetry_check(W, Y).passed)
        self.assertFalse(y_dual_symmetry_check(W, o2_resolution(W)).passed)

class TestSplitType(unittest.TestCase):
    def test_recovers_twists(self):
        h0 = lambda l: hilbert_p(W, l + 2) + hilbert_p(W, l - 1)
        self.assertEqual(infer_split_type(h0, W, (-4, 10)), [2, -1])
        self.assertEqual(infer_split_type(lambda l: hilbert_p(W, l), W, (-3, 8)), [0])

    def test_syzygy_sheaf_is_not_split(self):
        with self.assertRaises(NotSplitError):
            infer_split_type(lambda l: h_omega(W, 0, 1, l + 2), W, (-4, 10))

    def test_window_must_start_at_zero(self):
        with self.assertRaises(WindowError):
            infer_split_type(lambda l: hilbert_p(W, l + 5), W, (-3, 3))

if __name__ == '__main__':
    unittest.main()
