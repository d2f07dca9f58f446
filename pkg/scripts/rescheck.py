"""
Checks on a symmetric map alpha: (O + E)^v(-1-|w|) -> O + E whose
cokernel should be phi_* O_S.

A summand Omega^j(t) of O + E is carried by the rows e_I, |I| = j, of the
Koszul term it sits in, so alpha is stored as a homogeneous matrix of the
lifted free modules. Those rows satisfy the Koszul relations; on a chart
D(x_i) with w_i = 1 the rows e_I with i in I are dropped and what is left is
a frame of the summand. The reduced matrix is square and its determinant
and maximal minors are honest polynomials in the chart coordinates.

Determinants of large chart matrices are computed over GF(p) by
evaluation at a tensor grid of points followed by interpolation.
"""
from dataclasses import dataclass, field
from itertools import combinations
from multiprocessing import Pool
from typing import Optional, Sequence, Union

import numpy as np
import sympy
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix

from beilinson import Bundle, InvariantData, SheafKind
from cohom import chi_line, chi_omega
from common import (CLOSED_FORM, EVIDENCE, RESOLVED, ChartError, CheckResult, DegreeMismatchError,
                    FieldSpec, ToolkitError, check, info, make_rng, progress)
from gla import (DegreewiseIdeal, GradedFree, GradedMatrix, IdealGens, Presentation, degree_piece,
                 free_vector, matmul, rank, rref, zeros)
from koszul import Subset, koszul_sign, subsets
from ring import (ChartPoly, Poly, PolyRing, Weights, chart_ring, dehomogenize, format_poly,
                  monomials_of_degree, rehomogenize, weighted_degree)

AnyPoly = Union[Poly, ChartPoly]

@dataclass(frozen=True)
class SummandGroup:
    """Consecutive rows (or columns) carrying one summand of a bundle map."""
    sheaf: SheafKind
    start: int
    labels: tuple[Subset, ...] = ((),)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def indices(self) -> range:
        return range(self.start, self.start + self.size)

    def frame(self, chart: int) -> list[int]:
        return [self.start + k for k, I in enumerate(self.labels) if chart not in I]

    def twists(self, w: Weights) -> list[int]:
        if self.sheaf.is_line:
            return [-self.sheaf.twist]
        return [w.subset_sum(I) - self.sheaf.twist for I in self.labels]

def summand_groups(w: Weights, summands: Sequence[SheafKind]) -> list[SummandGroup]:
    groups, start = [], 0
    for s in summands:
        labels = ((),) if s.is_line else tuple(subsets(len(w), s.j))
        groups.append(SummandGroup(s, start, labels))
        start += len(labels)
    return groups

def free_of_groups(w: Weights, groups: Sequence[SummandGroup]) -> GradedFree:
    return GradedFree(w, tuple(a for g in groups for a in g.twists(w)))

@dataclass
class BundleMap:
    """A homogeneous matrix together with the summands its rows and columns carry."""
    matrix: GradedMatrix
    row_groups: list[SummandGroup]
    col_groups: list[SummandGroup]
    name: str = 'alpha'

    @classmethod
    def symmetric(cls, matrix: GradedMatrix, summands: Sequence[SheafKind], name: str = 'alpha') -> 'BundleMap':
        """(O + E)^v(-1-|w|) -> O + E, with O + E given summand by summand."""
        w = matrix.ring.weights
        rows = summand_groups(w, summands)
        if matrix.target.twists != free_of_groups(w, rows).twists:
            raise DegreeMismatchError(f"{name}: target twists {matrix.target.twists} do not match "
                                      f"{free_of_groups(w, rows).twists}")
        shift = -1 - w.total
        cols = [SummandGroup(g.sheaf.dual(w, shift), g.start, g.labels) for g in rows]
        return cls(matrix, rows, cols, name)

    @property
    def ring(self) -> PolyRing:
        return self.matrix.ring

    @property
    def weights(self) -> Weights:
        return self.matrix.ring.weights

    def entry(self, r: int, c: int) -> Poly:
        return self.matrix.entries[r][c]

def check_symmetric(m: Union[BundleMap, GradedMatrix], twist: int) -> bool:
    """alpha^v(twist) = alpha, after checking the source is the twisted dual of the target."""
    M = m.matrix if isinstance(m, BundleMap) else m
    expected = M.target.dual(-twist)
    if M.source.twists != expected.twists:
        raise DegreeMismatchError(f"source twists {M.source.twists} are not the dual twists {expected.twists}")
    size = M.target.rank
    return all(M.entries[i][j] == M.entries[j][i] for i in range(size) for j in range(i + 1, size))

def check_row_kernel(m: BundleMap, group: SummandGroup, side: str = 'rows') -> bool:
    """The lines e_I of an Omega^j group satisfy sum_{i not in J} +-x_i e_{J+i} = 0 for every |J| = j-1."""
    if group.sheaf.is_line:
        raise ToolkitError(f"{group.sheaf} carries no Koszul relation")
    w = m.weights
    ring = m.ring
    pos = {I: group.start + k for k, I in enumerate(group.labels)}
    other = m.matrix.source.rank if side == 'rows' else m.matrix.target.rank
    # column groups carry the dual sheaf but keep the row labels
    for J in subsets(len(w), len(group.labels[0]) - 1):
        for c in range(other):
            acc = ring.zero()
            for i in range(len(w)):
                if i in J:
                    continue
                I = tuple(sorted(J + (i,)))
                e = m.entry(pos[I], c) if side == 'rows' else m.entry(c, pos[I])
                if not e.is_zero():
                    acc = acc + (ring.var(i) * e).scale(koszul_sign(I, i))
            if not acc.is_zero():
                return False
    return True

def check_minimal(m: BundleMap) -> CheckResult:
    """No nonzero constant between equal summands of source and target."""
    violations = []
    for rg in m.row_groups:
        for cg in m.col_groups:
            if rg.sheaf != cg.sheaf:
                continue
            for r in rg.indices:
                for c in cg.indices:
                    e = m.entry(r, c)
                    if not e.is_zero() and e.degree == 0:
                        violations.append((r, c))
    return check('minimality', not violations, RESOLVED,
                 f"constant entries at {violations[:5]}", violations=len(violations))

@dataclass
class ChartMatrix:
    """Square matrix of chart polynomials; entry (i, j) dehomogenizes a form of degree a_j - b_i."""
    parent: PolyRing
    chart: int
    entries: list[list[ChartPoly]]
    row_twists: tuple[int, ...]
    col_twists: tuple[int, ...]
    row_labels: list[int] = field(default_factory=list)
    col_labels: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.row_labels:
            self.row_labels = list(range(len(self.row_twists)))
        if not self.col_labels:
            self.col_labels = list(range(len(self.col_twists)))

    @classmethod
    def from_graded(cls, M: GradedMatrix, chart: int) -> 'ChartMatrix':
        """Plain dehomogenization, for maps without Omega summands."""
        chart_ring(M.ring, chart)
        return cls(M.ring, chart, [[dehomogenize(g, chart) for g in row] for row in M.entries],
                   M.target.twists, M.source.twists)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_twists), len(self.col_twists)

    @property
    def size(self) -> int:
        rows, cols = self.shape
        if rows != cols:
            raise ToolkitError(f"chart matrix is {rows}x{cols}, not square")
        return rows

    @property
    def field_spec(self) -> FieldSpec:
        return self.parent.field

    @property
    def cring(self) -> PolyRing:
        return chart_ring(self.parent, self.chart)

    def homogeneous_degree(self, rows: Sequence[int], cols: Sequence[int]) -> int:
        return sum(self.col_twists[j] for j in cols) - sum(self.row_twists[i] for i in rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> 'ChartMatrix':
        return ChartMatrix(self.parent, self.chart, [[self.entries[i][j] for j in cols] for i in rows],
                           tuple(self.row_twists[i] for i in rows), tuple(self.col_twists[j] for j in cols),
                           [self.row_labels[i] for i in rows], [self.col_labels[j] for j in cols])

    def scaled(self, index: int, c) -> 'ChartMatrix':
        """Row and column `index` times the unit c; keeps a symmetric matrix symmetric."""
        entries = [list(row) for row in self.entries]
        for k in range(self.shape[1]):
            entries[index][k] = ChartPoly(self.parent, self.chart, entries[index][k].poly.scale(c))
        for k in range(self.shape[0]):
            entries[k][index] = ChartPoly(self.parent, self.chart, entries[k][index].poly.scale(c))
        return ChartMatrix(self.parent, self.chart, entries, self.row_twists, self.col_twists,
                           self.row_labels, self.col_labels)

def chart_reduce(m: BundleMap, chart: int) -> ChartMatrix:
    """Restrict to D(x_chart) in the contraction frames of the Omega summands."""
    w = m.weights
    if w[chart] != 1:
        raise ChartError(f"chart x{chart} has weight {w[chart]}")
    for groups, side in ((m.row_groups, 'rows'), (m.col_groups, 'cols')):
        for g in groups:
            if not g.sheaf.is_line and not check_row_kernel(m, g, side):
                raise ChartError(f"{m.name}: {side} of the {g.sheaf} summand at {g.start} "
                                 f"do not satisfy the Koszul relations")
    rows = [r for g in m.row_groups for r in g.frame(chart)]
    cols = [c for g in m.col_groups for c in g.frame(chart)]
    M = m.matrix
    return ChartMatrix(m.ring, chart, [[dehomogenize(M.entries[r][c], chart) for c in cols] for r in rows],
                       tuple(M.target.twists[r] for r in rows), tuple(M.source.twists[c] for c in cols),
                       rows, cols)

# -- exact determinants ------------------------------------------------------

def _sympy_ring(ring: PolyRing):
    F = ring.field
    base = GF(F.prime) if F.is_prime else QQ
    return base.poly_ring(*sympy.symbols(list(ring.names))), base

def _to_sympy(K, base, g: Poly):
    F = g.ring.field
    if F.is_prime:
        return K.ring.from_dict({m: base(int(c)) for m, c in g.terms.items()})
    return K.ring.from_dict({m: QQ(c.numerator, c.denominator) for m, c in g.terms.items()})

def _from_sympy(ring: PolyRing, elem) -> Poly:
    F = ring.field
    terms = {}
    for m, c in elem.items():
        if F.is_prime:
            terms[tuple(m)] = F(int(c))
        else:
            terms[tuple(m)] = F(sympy.Rational(int(c.numerator), int(c.denominator)))
    return Poly(ring, terms)

def det_poly(entries: Sequence[Sequence[AnyPoly]]) -> AnyPoly:
    """Fraction-free (Bareiss) determinant of a square matrix of polynomials."""
    rows = [list(r) for r in entries]
    k = len(rows)
    if k == 0 or any(len(r) != k for r in rows):
        raise ToolkitError('determinant of an empty or non-square matrix')
    first = rows[0][0]
    charted = isinstance(first, ChartPoly)
    polys = [[e.poly if charted else e for e in r] for r in rows]
    ring = polys[0][0].ring
    K, base = _sympy_ring(ring)
    dm = DomainMatrix([[_to_sympy(K, base, g) for g in r] for r in polys], (k, k), K)
    d = _from_sympy(ring, dm.det())
    return ChartPoly(first.parent, first.chart, d) if charted else d

# -- evaluation and interpolation over GF(p) ------------------------------------

def _vec_inverse(x: np.ndarray, p: int) -> np.ndarray:
    """x^(p-2) mod p elementwise; zero stays zero."""
    result = np.ones_like(x)
    base = x % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result

def batch_det_mod(A: np.ndarray, p: int) -> np.ndarray:
    """Determinants of a stack (B, k, k) of matrices over GF(p)."""
    A = np.array(A, dtype=np.int64) % p
    B, k = A.shape[0], A.shape[1]
    det = np.ones(B, dtype=np.int64)
    idx = np.arange(B)
    for c in range(k):
        nz = A[:, c:, c] != 0
        piv = c + np.argmax(nz, axis=1)
        swap = nz.any(axis=1) & (piv != c)
        if swap.any():
            s, t = idx[swap], piv[swap]
            top = A[s, c].copy()
            A[s, c] = A[s, t]
            A[s, t] = top
            det[swap] = (-det[swap]) % p
        pivot = A[:, c, c]
        det = det * pivot % p
        if c + 1 == k:
            break
        factors = A[:, c + 1:, c] * _vec_inverse(pivot, p)[:, None] % p
        A[:, c + 1:, c:] = (A[:, c + 1:, c:] - factors[:, :, None] * A[:, c:c + 1, c:] % p) % p
    return det

def _inverse_mod(F: FieldSpec, V: np.ndarray) -> np.ndarray:
    n = V.shape[0]
    R, pivots = rref(F, np.hstack([V % F.prime, np.eye(n, dtype=np.int64)]))
    if pivots[:n] != list(range(n)):
        raise ToolkitError('interpolation nodes are not distinct')
    return R[:, n:]

def interpolate_grid(F: FieldSpec, values: np.ndarray, nodes: Sequence[np.ndarray]) -> np.ndarray:
    """Coefficients c[e_0, .., e_k] of the polynomial taking `values` on the tensor grid of `nodes`."""
    C = np.array(values, dtype=np.int64) % F.prime
    for axis, x in enumerate(nodes):
        V = np.array([[pow(int(xi), e, F.prime) for e in range(len(x))] for xi in x], dtype=np.int64)
        C = np.moveaxis(C, axis, 0)
        shape = C.shape
        C = matmul(F, _inverse_mod(F, V), C.reshape(shape[0], -1)).reshape(shape)
        C = np.moveaxis(C, 0, axis)
    return C

@dataclass
class GridEvaluation:
    """A chart matrix evaluated at every point of a tensor grid."""
    cm: ChartMatrix
    nodes: list[np.ndarray]
    values: np.ndarray
    bound: int
    seed: int

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return tuple(len(x) for x in self.nodes)

def evaluate_chart_matrix(cm: ChartMatrix, bound: int, seed: int = 0) -> GridEvaluation:
    """Enough random distinct nodes per coordinate for a form of weighted degree <= bound."""
    F = cm.field_spec
    if not F.is_prime:
        raise ToolkitError('grid evaluation needs a prime field')
    p = F.prime
    rng = make_rng(seed)
    cring = cm.cring
    nodes = []
    for name, wk in zip(cring.names, cring.weights):
        count = 1 if name == '_pad' else bound // wk + 1
        if count >= p:
            raise ToolkitError(f"degree bound {bound} too large for GF({p})")
        nodes.append(np.array(rng.sample(range(1, p), count), dtype=np.int64))
    shape = tuple(len(x) for x in nodes)
    top = [0] * cring.nvars
    for row in cm.entries:
        for e in row:
            for m in e.poly.terms:
                top = [max(t, x) for t, x in zip(top, m)]
    powers = []
    for k, x in enumerate(nodes):
        table = np.ones((max(top[k], len(x)) + 1, len(x)), dtype=np.int64)
        for e in range(1, table.shape[0]):
            table[e] = table[e - 1] * x % p
        axis_shape = [1] * len(nodes)
        axis_shape[k] = len(x)
        powers.append((table, axis_shape))
    rows, cols = cm.shape
    values = np.zeros(shape + (rows, cols), dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            acc = np.zeros(shape, dtype=np.int64)
            for m, c in cm.entries[i][j].poly.terms.items():
                term = np.full(shape, int(c) % p, dtype=np.int64)
                for k, e in enumerate(m):
                    if e:
                        table, axis_shape = powers[k]
                        term = term * table[e].reshape(axis_shape) % p
                acc = (acc + term) % p
            values[..., i, j] = acc
    return GridEvaluation(cm, nodes, values, bound, seed)

def grid_minor(ge: GridEvaluation, rows: Sequence[int], cols: Sequence[int]) -> ChartPoly:
    """det of a square submatrix, interpolated back to a chart polynomial."""
    cm = ge.cm
    F = cm.field_spec
    degree = cm.homogeneous_degree(rows, cols)
    if degree > ge.bound:
        raise DegreeMismatchError(f"minor of degree {degree} exceeds the grid bound {ge.bound}")
    shape = ge.grid_shape
    sub = ge.values[..., list(rows), :][..., list(cols)].reshape((-1, len(rows), len(cols)))
    dets = batch_det_mod(sub, F.prime).reshape(shape)
    coeffs = interpolate_grid(F, dets, ge.nodes)
    cring = cm.cring
    terms = {}
    for exps in np.argwhere(coeffs != 0):
        m = tuple(int(e) for e in exps)
        if weighted_degree(cring.weights, m) > degree:
            raise DegreeMismatchError(f"interpolated minor has a term beyond degree {degree}")
        terms[m] = int(coeffs[tuple(exps)])
    return ChartPoly(cm.parent, cm.chart, Poly(cring, terms))

def chart_det(cm: ChartMatrix, seed: int = 0, method: str = 'auto') -> ChartPoly:
    size = cm.size
    if method == 'auto':
        method = 'interpolate' if cm.field_spec.is_prime else 'bareiss'
    if method == 'bareiss':
        return det_poly(cm.entries)
    everything = list(range(size))
    ge = evaluate_chart_matrix(cm, cm.homogeneous_degree(everything, everything), seed)
    return grid_minor(ge, everything, everything)

def proportional(g: Poly, h: Poly) -> bool:
    """g = c h for a nonzero constant c."""
    if g.is_zero() or h.is_zero():
        return g.is_zero() and h.is_zero()
    if set(g.terms) != set(h.terms):
        return False
    F = g.ring.field
    m0 = next(iter(g.terms))
    ratio = F.mul(g.terms[m0], F.inv(h.terms[m0]))
    return all(g.terms[m] == F.mul(ratio, h.terms[m]) for m in g.terms)

# -- Fitting ideals -------------------------------------------------------------

MinorKey = tuple[tuple[int, ...], tuple[int, ...]]

@dataclass
class FittingIdeal:
    """The k x k minors of a matrix, as homogeneous forms, each with the rows and columns it uses."""
    k: int
    gens: list[Poly]
    keys: list[MinorKey]

    def nonzero(self) -> list[Poly]:
        out, seen = [], set()
        for g in self.gens:
            if not g.is_zero() and g not in seen:
                seen.add(g)
                out.append(g)
        return out

    def ideal(self) -> IdealGens:
        return IdealGens(self.gens[0].ring, self.nonzero())

    def degrees(self) -> list[int]:
        return sorted({g.degree for g in self.nonzero()})

def _complement(size: int, drop: int) -> tuple[int, ...]:
    return tuple(k for k in range(size) if k != drop)

def chart_minors(cm: ChartMatrix, keys: Sequence[MinorKey], seed: int = 0) -> dict[MinorKey, Poly]:
    """Minors of a chart matrix, rehomogenized at their degree in the homogeneous lift."""
    degrees = {key: cm.homogeneous_degree(*key) for key in keys}
    out = {}
    if cm.field_spec.is_prime:
        ge = evaluate_chart_matrix(cm, max(degrees.values(), default=0), seed)
        for key in progress(keys, desc='minors'):
            out[key] = rehomogenize(grid_minor(ge, *key), degrees[key])
    else:
        for key in progress(keys, desc='minors'):
            rows, cols = key
            c = det_poly([[cm.entries[i][j] for j in cols] for i in rows])
            out[key] = rehomogenize(c, degrees[key])
    return out

def fitting_minors(m: Union[GradedMatrix, ChartMatrix], k: int, seed: int = 0) -> FittingIdeal:
    """All k x k minors, ordered by the rows and columns they use."""
    rows, cols = m.shape
    if not 0 < k <= min(rows, cols):
        raise ToolkitError(f"no {k}x{k} minors in a {rows}x{cols} matrix")
    keys = [(r, c) for r in combinations(range(rows), k) for c in combinations(range(cols), k)]
    if isinstance(m, ChartMatrix):
        minors = chart_minors(m, keys, seed)
        return FittingIdeal(k, [minors[key] for key in keys], keys)
    gens = []
    for r, c in keys:
        d = det_poly([[m.entries[i][j] for j in c] for i in r])
        degree = sum(m.source.twists[j] for j in c) - sum(m.target.twists[i] for i in r)
        gens.append(Poly(m.ring, d.terms, degree))
    return FittingIdeal(k, gens, keys)

# -- rank condition -----------------------------------------------------------------

_MEMBERSHIP: Optional[tuple[DegreewiseIdeal, int, int]] = None

def _init_membership(gens: list[Poly], chart: int, k_max: int):
    global _MEMBERSHIP
    _MEMBERSHIP = (DegreewiseIdeal(IdealGens(gens[0].ring, gens)), chart, k_max)

def saturated_member(ideal: DegreewiseIdeal, g: Poly, chart: int, k_max: int) -> Optional[int]:
    """Smallest k <= k_max with x_chart^k g in the ideal."""
    x = g.ring.var(chart)
    h = g
    for k in range(k_max + 1):
        if ideal.contains(h):
            return k
        h = h * x
    return None

def _membership_task(item):
    key, g = item
    ideal, chart, k_max = _MEMBERSHIP
    return key, saturated_member(ideal, g, chart, k_max)

def _key_label(cm: ChartMatrix, key: MinorKey) -> str:
    rows, cols = key
    dr = [cm.row_labels[i] for i in range(cm.size) if i not in rows]
    dc = [cm.col_labels[j] for j in range(cm.size) if j not in cols]
    return f"r{dr[0]}c{dc[0]}"

@dataclass
class RankCondition:
    result: CheckResult
    det: Poly
    full: FittingIdeal
    prime: FittingIdeal

def rank_condition(cm: ChartMatrix, k_max: int = 4, sample: float = 1.0, seed: int = 0,
                   workers: int = 1) -> RankCondition:
    """I_r(alpha') = I_r(alpha) on the chart, r = size - 1, alpha' = alpha without its first row.

    I_r(alpha') is inside I_r(alpha) always; the other inclusion is tested
    minor by minor, allowing a power x_chart^k with k <= k_max.
    """
    size = cm.size
    r = size - 1
    if r < 1:
        raise ToolkitError('rank condition needs at least a 2x2 matrix')
    keys = [(_complement(size, i), _complement(size, j)) for i in range(size) for j in range(size)]
    everything = tuple(range(size))
    minors = chart_minors(cm, keys + [(everything, everything)], seed)
    det = minors.pop((everything, everything))
    prime_keys = [key for key in keys if 0 not in key[0]]
    full = FittingIdeal(r, [minors[key] for key in keys], keys)
    prime = FittingIdeal(r, [minors[key] for key in prime_keys], prime_keys)
    tested = [key for key in keys if 0 in key[0]]
    if sample < 1.0:
        rng = make_rng(seed)
        tested = rng.sample(tested, max(1, round(len(tested) * sample)))
    tested.sort(key=lambda key: (minors[key].degree or 0, key))
    tasks = [(key, minors[key]) for key in tested]
    gens = prime.nonzero()
    provenance = EVIDENCE if cm.field_spec.is_prime else RESOLVED
    if not gens:
        bad = [key for key in tested if not minors[key].is_zero()]
        return RankCondition(check('rank_condition', not bad, provenance, 'I_r(alpha\') is zero',
                                   size=size, tested=len(tested)), det, full, prime)
    info(f"  testing {len(tasks)} of {len(keys)} minors against {len(gens)} generators")
    if workers > 1:
        with Pool(processes=workers, initializer=_init_membership, initargs=(gens, cm.chart, k_max)) as pool:
            results = list(progress(pool.imap(_membership_task, tasks), total=len(tasks), desc='membership'))
    else:
        _init_membership(gens, cm.chart, k_max)
        results = [_membership_task(t) for t in progress(tasks, desc='membership')]
    failures = [key for key, k in results if k is None]
    exponents = {_key_label(cm, key): k for key, k in results}
    witness = None
    if failures:
        key = failures[0]
        witness = f"minor {_key_label(cm, key)} = {format_poly(minors[key])} not in I_r(alpha') up to x{cm.chart}^{k_max}"
    result = check('rank_condition', not failures, provenance, witness,
                   chart=f"x{cm.chart}", size=size, r=r, minors=len(keys), tested=len(tested),
                   sample=sample, seed=seed, k_max=k_max, field=cm.field_spec.name,
                   generator_degrees=sorted(g.degree for g in gens), exponents=exponents)
    return RankCondition(result, det, full, prime)

def depth_check(det: Poly, fitting: FittingIdeal) -> CheckResult:
    """det lies in I_r and I_r is not contained in (det): some nonzero minor has smaller degree."""
    ideal = DegreewiseIdeal(fitting.ideal())
    member = ideal.contains(det)
    smaller = [g.degree for g in fitting.nonzero() if g.degree < det.degree]
    return check('depth', member and bool(smaller), RESOLVED,
                 'det not in I_r' if not member else 'every minor has degree >= deg det',
                 det_degree=det.degree, minor_degrees=fitting.degrees())

# -- annihilation, Euler characteristics, negative controls -------------------------

def annihilation_check(f: Poly, R: Presentation) -> CheckResult:
    """f kills every generator of the module presented by R.

    When R knows a regular variable the cokernel is built degree by degree
    and f e_k is tested for zero there; otherwise f e_k is tested against the
    span of the relations in its degree.
    """
    ring = R.ring
    failures = []
    if R.regular is not None and not f.is_zero():
        M = R.cokernel()
        try:
            for k in progress(range(R.generators.rank), desc='annihilation'):
                if M.apply(f, k).any():
                    failures.append(k)
        except ToolkitError as e:
            # a truncated presentation can have torsion the full module lacks
            return check('annihilation', False, EVIDENCE, str(e), generators=R.generators.rank,
                         stabilized=R.stabilized, degree=f.degree)
    else:
        for k, t in enumerate(R.generators.twists):
            d = t + f.degree if not f.is_zero() else t
            vec = [f if j == k else ring.zero() for j in range(R.generators.rank)]
            v = free_vector(R.generators, vec, d)
            if not v.any():
                continue
            A = degree_piece(R.relations, d) if R.relations.source.rank else zeros(ring.field, len(v), 0)
            if rank(ring.field, A) != rank(ring.field, np.hstack([A, v[:, None]])):
                failures.append(k)
    provenance = RESOLVED if R.stabilized else EVIDENCE
    return check('annihilation', not failures, provenance, f"f e_{failures[0]} is not a relation" if failures else None,
                 generators=R.generators.rank, stabilized=R.stabilized, degree=f.degree)

def annihilation_at_points(f: Poly, points: Sequence[Sequence]) -> CheckResult:
    """f vanishes at sample points of the image surface."""
    bad = [k for k, pt in enumerate(points) if f.evaluate(pt) != 0]
    return check('annihilation', not bad, EVIDENCE, f"f({list(points[bad[0]])}) != 0" if bad else None,
                 points=len(points), degree=f.degree)

def _chi_sheaf(w: Weights, s: SheafKind, d: int) -> int:
    if s.is_line:
        return chi_line(w, s.twist + d)
    return chi_omega(w, s.j, s.twist + d)

def euler_exactness(w: Weights, E: Bundle, inv: InvariantData, degrees: Sequence[int]) -> CheckResult:
    """chi((O+E)(d)) - chi((O+E)^v(-1-|w|)(d)) = chi(O_S(dK)) at every tested d."""
    summands = [(SheafKind.line(0), 1)] + list(E.summands.items())
    shift = -1 - w.total
    values, bad = {}, []
    for d in degrees:
        lhs = sum(m * (_chi_sheaf(w, s, d) - _chi_sheaf(w, s.dual(w, shift), d)) for s, m in summands)
        rhs = inv.chi_multiple(d)
        values[d] = [lhs, rhs]
        if lhs != rhs:
            bad.append(d)
    return check('euler_exactness', not bad, CLOSED_FORM, f"mismatch in degree {bad[0]}" if bad else None,
                 values=values)

def random_form(ring: PolyRing, d: int, rng) -> Poly:
    F = ring.field
    return Poly(ring, {m: F.random(rng) for m in monomials_of_degree(ring.weights, d)}, d)

def random_symmetric_matrix(ring: PolyRing, row_twists: Sequence[int], shift: int, rng,
                            zero_constants: bool = True) -> GradedMatrix:
    """Random symmetric homogeneous map target.dual(shift) -> target."""
    target = GradedFree(ring.weights, tuple(row_twists))
    source = target.dual(shift)
    size = target.rank
    entries = [[ring.zero() for _ in range(size)] for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            d = source.twists[j] - target.twists[i]
            if d < 0 or (d == 0 and zero_constants):
                continue
            g = random_form(ring, d, rng)
            entries[i][j] = entries[j][i] = g
    return GradedMatrix(ring, source, target, entries)

def random_symmetric_chart(ring: PolyRing, row_twists: Sequence[int], shift: int, chart: int, rng) -> ChartMatrix:
    return ChartMatrix.from_graded(random_symmetric_matrix(ring, row_twists, shift, rng), chart)


import unittest
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from koszul import koszul

W = Weights((1, 1, 2, 3))
GFP = FieldSpec(65521)

def _matrix(ring, entries, row_twists, col_twists):
    return GradedMatrix(ring, GradedFree(ring.weights, tuple(col_twists)),
                        GradedFree(ring.weights, tuple(row_twists)), entries)

class TestBundleMaps(unittest.TestCase):
    def setUp(self):
        self.ring = PolyRing(W, GFP)
        self.x = self.ring.gens()

    def test_symmetrized_random_matrix(self):
        rng = make_rng(3)
        M = random_symmetric_matrix(self.ring, (0, 1, 2), 5, rng)
        self.assertTrue(check_symmetric(M, -5))
        entries = [list(row) for row in M.entries]
        entries[0][1] = entries[0][1] + self.x[0] ** 4
        P = GradedMatrix(self.ring, M.source, M.target, entries)
        self.assertFalse(check_symmetric(P, -5))

    def test_halved_sum_is_symmetric(self):
        rng = make_rng(5)
        target = GradedFree(W, (0, 1, 2))
        source = target.dual(5)
        entries = [[random_form(self.ring, source.twists[j] - target.twists[i], rng)
                    for j in range(3)] for i in range(3)]
        half = GFP.inv(2)
        sym = [[(entries[i][j] + entries[j][i]).scale(half) for j in range(3)] for i in range(3)]
        self.assertTrue(check_symmetric(GradedMatrix(self.ring, source, target, sym), -5))

    def test_twist_mismatch_raises(self):
        M = random_symmetric_matrix(self.ring, (0, 1), 3, make_rng(1))
        with self.assertRaises(DegreeMismatchError):
            check_symmetric(M, -4)

    def _koszul_map(self):
        K = koszul(W, GFP)
        d2 = K.diffs[-2]
        rows = [SummandGroup(SheafKind.omega(W, 1, 0), 0, tuple(K.labels[-1]))]
        cols = [SummandGroup(SheafKind.line(-a), c) for c, a in enumerate(d2.source.twists)]
        return BundleMap(d2, rows, cols, 'd2')

    def test_koszul_rows_satisfy_relations(self):
        m = self._koszul_map()
        self.assertTrue(check_row_kernel(m, m.row_groups[0]))
        entries = [list(row) for row in m.matrix.entries]
        entries[0][0] = entries[0][0] + self.x[0]
        broken = BundleMap(GradedMatrix(self.ring, m.matrix.source, m.matrix.target, entries),
                           m.row_groups, m.col_groups)
        self.assertFalse(check_row_kernel(broken, broken.row_groups[0]))

    def test_chart_frame(self):
        m = self._koszul_map()
        cm = chart_reduce(m, 0)
        self.assertEqual(cm.shape, (3, 6))
        self.assertEqual(cm.row_labels, [1, 2, 3])
        self.assertEqual(cm.entries[0][0].poly, dehomogenize(m.entry(1, 0), 0).poly)
        with self.assertRaises(ChartError):
            chart_reduce(m, 2)

    def test_line_groups_have_no_relation(self):
        m = self._koszul_map()
        with self.assertRaises(ToolkitError):
            check_row_kernel(m, m.col_groups[0], 'cols')

    def test_minimality(self):
        free = GradedFree(W, (0,))
        identity = BundleMap(GradedMatrix.identity(self.ring, free),
                             [SummandGroup(SheafKind.line(0), 0)], [SummandGroup(SheafKind.line(0), 0)])
        self.assertFalse(check_minimal(identity).passed)
        K = koszul(W, GFP)
        d1 = K.diffs[-1]
        m = BundleMap(d1, [SummandGroup(SheafKind.line(0), 0)],
                      [SummandGroup(SheafKind.line(-a), c) for c, a in enumerate(d1.source.twists)])
        self.assertTrue(check_minimal(m).passed)

    def test_symmetric_constructor(self):
        summands = [SheafKind.line(0), SheafKind.line(-2), SheafKind.omega(W, 1, -1)]
        groups = summand_groups(W, summands)
        self.assertEqual(free_of_groups(W, groups).twists, (0, 2, 2, 2, 3, 4))
        M = random_symmetric_matrix(self.ring, (0, 2, 2, 2, 3, 4), 1 + W.total, make_rng(0))
        m = BundleMap.symmetric(M, summands)
        self.assertEqual(m.col_groups[2].sheaf, SheafKind.omega(W, 2, 0))
        self.assertEqual(m.col_groups[0].sheaf, SheafKind.line(-8))

class TestDeterminants(unittest.TestCase):
    def setUp(self):
        self.ring = PolyRing(W, GFP)
        self.x = self.ring.gens()

    def test_small_dets(self):
        x0, x1 = self.x[0], self.x[1]
        z = self.ring.zero()
        self.assertEqual(det_poly([[x0, z], [z, x1]]), x0 * x1)
        self.assertEqual(det_poly([[x0, x1], [-x1, x0]]), x0 * x0 + x1 * x1)

    def test_rational_dets(self):
        ring = PolyRing(W, FieldSpec(None))
        x0, x1 = ring.gens()[:2]
        g = det_poly([[x0.scale(Fraction(1, 2)), x1], [x1, x0]])
        self.assertEqual(g, (x0 * x0).scale(Fraction(1, 2)) - x1 * x1)

    def test_batch_det_matches_exact(self):
        rng = np.random.default_rng(0)
        p = GFP.prime
        A = rng.integers(0, p, size=(20, 5, 5), dtype=np.int64)
        A[3, :, 2] = 0
        A[4, 1] = A[4, 0]
        dets = batch_det_mod(A, p)
        for b in range(20):
            ring = PolyRing(W, GFP)
            M = [[ring.const(int(A[b, i, j])) for j in range(5)] for i in range(5)]
            exact = det_poly(M).coefficient((0, 0, 0, 0))
            self.assertEqual(int(dets[b]), exact)
        self.assertEqual(dets[3], 0)
        self.assertEqual(dets[4], 0)

    def test_interpolation_recovers_polynomial(self):
        F = GFP
        nodes = [np.array([3, 7, 11], dtype=np.int64), np.array([2, 5], dtype=np.int64)]
        coeffs = np.array([[1, 4], [0, 2], [5, 0]], dtype=np.int64)
        values = np.zeros((3, 2), dtype=np.int64)
        for a, xa in enumerate(nodes[0]):
            for b, xb in enumerate(nodes[1]):
                values[a, b] = sum(int(coeffs[i, j]) * pow(int(xa), i) * pow(int(xb), j)
                                   for i in range(3) for j in range(2)) % F.prime
        self.assertTrue(np.array_equal(interpolate_grid(F, values, nodes), coeffs))

    def test_grid_det_matches_bareiss(self):
        ring = PolyRing(W, GFP)
        cm = random_symmetric_chart(ring, (0, 1, 2), 5, 1, make_rng(7))
        grid = rehomogenize(chart_det(cm, seed=2, method='interpolate'), 9)
        exact = rehomogenize(chart_det(cm, method='bareiss'), 9)
        self.assertEqual(grid, exact)
        homogeneous = det_poly(random_symmetric_matrix(ring, (0, 1, 2), 5, make_rng(7)).entries)
        self.assertEqual(homogeneous.degree, 9)
        self.assertEqual(grid, homogeneous)

    def test_charts_agree_up_to_scalar(self):
        ring = PolyRing(W, GFP)
        M = random_symmetric_matrix(ring, (0, 1, 2), 5, make_rng(11))
        d0 = rehomogenize(chart_det(ChartMatrix.from_graded(M, 0)), 9)
        d1 = rehomogenize(chart_det(ChartMatrix.from_graded(M, 1)), 9)
        self.assertTrue(proportional(d0, d1))

    def test_fitting_ideals(self):
        x0, x1 = self.x[0], self.x[1]
        row = _matrix(self.ring, [[x0, x1]], (0,), (1, 1))
        I1 = fitting_minors(row, 1)
        self.assertEqual(set(I1.nonzero()), {x0, x1})
        z = self.ring.zero()
        diag = _matrix(self.ring, [[x0, z], [z, x1]], (0, 0), (1, 1))
        self.assertEqual(fitting_minors(diag, 2).gens, [x0 * x1])

    def test_top_minor_is_det(self):
        M = random_symmetric_matrix(self.ring, (0, 1, 2), 5, make_rng(4))
        self.assertEqual(fitting_minors(M, 3).gens, [det_poly(M.entries)])

class TestRankCondition(unittest.TestCase):
    def setUp(self):
        self.ring = PolyRing(W, GFP)
        self.x = self.ring.gens()

    def _chart(self, entries):
        M = _matrix(self.ring, entries, (0, 1), (3, 2))
        self.assertTrue(check_symmetric(M, -3))
        return ChartMatrix.from_graded(M, 0)

    def test_holds(self):
        z, x1, x2 = self.ring.zero(), self.x[1], self.x[2]
        rc = rank_condition(self._chart([[z, x2], [x2, x1]]))
        self.assertTrue(rc.result.passed)
        self.assertEqual(rc.result.provenance, EVIDENCE)
        self.assertEqual(set(rc.prime.nonzero()), {x1, x2})

    def test_fails_with_witness(self):
        x1, x2, x3 = self.x[1], self.x[2], self.x[3]
        rc = rank_condition(self._chart([[x3, x2], [x2, x1]]))
        self.assertFalse(rc.result.passed)
        self.assertIn('x3', rc.result.witness)

    def test_invariant_under_units(self):
        z, x1, x2 = self.ring.zero(), self.x[1], self.x[2]
        cm = self._chart([[z, x2], [x2, x1]]).scaled(1, 3)
        self.assertTrue(rank_condition(cm).result.passed)

    def test_random_control(self):
        cm = random_symmetric_chart(self.ring, (0, 1, 2), 5, 1, make_rng(9))
        rc = rank_condition(cm, sample=0.5)
        self.assertEqual(rc.result.details['tested'], 3)
        self.assertEqual(rc.det.degree, 9)

    def test_saturation_power(self):
        x0, x1 = self.x[0], self.x[1]
        ideal = DegreewiseIdeal(IdealGens(self.ring, [x0 * x1]))
        self.assertEqual(saturated_member(ideal, x1, 0, 4), 1)
        self.assertIsNone(saturated_member(ideal, x0, 0, 4))

    def test_depth(self):
        z, x1, x2 = self.ring.zero(), self.x[1], self.x[2]
        M = _matrix(self.ring, [[z, x2], [x2, x1]], (0, 1), (3, 2))
        det = det_poly(M.entries)
        self.assertTrue(depth_check(det, fitting_minors(M, 1)).passed)
        self.assertFalse(depth_check(det, FittingIdeal(1, [det], [((0,), (0,))])).passed)

class TestExactness(unittest.TestCase):
    def setUp(self):
        self.ring = PolyRing(W, GFP)
        self.x = self.ring.gens()

    def test_annihilation(self):
        x0, x1, x2 = self.x[0], self.x[1], self.x[2]
        gens = GradedFree(W, (0,))
        rel = GradedMatrix(self.ring, GradedFree(W, (2,)), gens, [[x0 * x1]])
        R = Presentation(self.ring, gens, rel)
        self.assertTrue(annihilation_check(x0 * x1 * x2, R).passed)
        self.assertFalse(annihilation_check(x2, R).passed)

    def test_annihilation_through_cokernel(self):
        x0, x1, x2, x3 = self.x
        gens = GradedFree(W, (0, 1))
        # K[x]/(x1) e0 + K[x]/(x2) e1, killed exactly by the multiples of x1*x2
        rel = GradedMatrix(self.ring, GradedFree(W, (1, 3)), gens, [[x1, self.ring.zero()], [self.ring.zero(), x2]])
        R = Presentation(self.ring, gens, rel, regular=0)
        self.assertTrue(annihilation_check(x1 * x2, R).passed)
        self.assertTrue(annihilation_check(x0 ** 4 * x1 * x2 + x2 ** 3 * x1, R).passed)
        self.assertFalse(annihilation_check(x1 * x1, R).passed)
        self.assertFalse(annihilation_check(x1 * x2 + x0 ** 3, R).passed)
        plain = Presentation(self.ring, gens, rel)
        for f in (x1 * x2, x1 * x1, x3 * x1 * x2):
            self.assertEqual(annihilation_check(f, R).passed, annihilation_check(f, plain).passed)

    def test_annihilation_at_points(self):
        f = self.x[0] * self.x[1]
        self.assertTrue(annihilation_at_points(f, [(0, 1, 2, 3), (5, 0, 1, 1)]).passed)
        self.assertFalse(annihilation_at_points(f, [(1, 1, 1, 1)]).passed)

    def test_euler_exactness(self):
        E = Bundle(name='E')
        E.add(SheafKind.line(-2), 1)
        E.add(SheafKind.line(-3), 2)
        E.add(SheafKind.omega(W, 1, -1), 2)
        inv = InvariantData(pg=2, q=2, K2=4, chi=1)
        result = euler_exactness(W, E, inv, [0, 2, 5])
        self.assertTrue(result.passed)
        self.assertEqual(result.details['values'], {0: [1, 1], 2: [5, 5], 5: [41, 41]})

    @given(st.integers(min_value=-6, max_value=8))
    @settings(max_examples=15, deadline=None)
    def test_euler_exactness_any_degree(self, d):
        E = Bundle(name='E')
        E.add(SheafKind.line(-2), 1)
        E.add(SheafKind.line(-3), 2)
        E.add(SheafKind.omega(W, 1, -1), 2)
        inv = InvariantData(pg=2, q=2, K2=4, chi=1)
        self.assertTrue(euler_exactness(W, E, inv, [d]).passed)


if __name__ == '__main__':
    unittest.main()
