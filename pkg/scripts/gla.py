"""
Degreewise graded linear algebra over P(w).

Every module or ideal question is answered on finite graded pieces: a
homogeneous matrix between twisted free modules becomes an honest field
matrix in each degree, and kernels, ranks, memberships and syzygies are read
off from reduced row echelon forms. No Groebner bases.

Matrices over GF(p) are int64 numpy arrays with entries in [0, p); over QQ
they are object arrays of Fractions and elimination goes through sympy's
DomainMatrix.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from common import DegreeMismatchError, FieldSpec, ToolkitError, progress
from ring import (Poly, PolyRing, Weights, hilbert_p, mono_mul, monomial_index,
                  monomials_of_degree, weighted_degree)

# float64 products are exact while the accumulated sum stays below 2**53
_EXACT_FLOAT = 2 ** 53

def zeros(F: FieldSpec, rows: int, cols: int) -> np.ndarray:
    if F.is_prime:
        return np.zeros((rows, cols), dtype=np.int64)
    out = np.empty((rows, cols), dtype=object)
    out.fill(Fraction(0))
    return out

def as_matrix(F: FieldSpec, rows) -> np.ndarray:
    if F.is_prime:
        return np.array(rows, dtype=np.int64).reshape(len(rows), -1) % F.prime if len(rows) else np.zeros((0, 0), dtype=np.int64)
    return np.array([[F(x) for x in row] for row in rows], dtype=object)

def reduce_mod(F: FieldSpec, A: np.ndarray) -> np.ndarray:
    return A % F.prime if F.is_prime else A

def matmul(F: FieldSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact product over the field."""
    if A.shape[1] == 0:
        return zeros(F, A.shape[0], B.shape[1])
    if not F.is_prime:
        return A.dot(B)
    p = F.prime
    chunk = _EXACT_FLOAT // (p * p)
    if chunk >= 1:
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for start in range(0, A.shape[1], chunk):
            part = A[:, start:start + chunk].astype(np.float64) @ B[start:start + chunk].astype(np.float64)
            out = (out + part.astype(np.int64) % p) % p
        return out
    return (A.astype(object).dot(B.astype(object)) % p).astype(np.int64)

def _rref_mod(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    A = np.array(A, dtype=np.int64) % p
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r, c:] = A[r, c:] * pow(int(A[r, c]), -1, p) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            # row r vanishes left of c, so only the tail needs updating
            A[hit, c:] = (A[hit, c:] - np.outer(col[hit], A[r, c:]) % p) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots

def _rref_qq(A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    rows, cols = A.shape
    if rows == 0 or cols == 0:
        return np.empty((0, cols), dtype=object), []
    dm = DomainMatrix([[QQ(x.numerator, x.denominator) for x in row] for row in A], (rows, cols), QQ)
    R, pivots = dm.rref()
    pivots = list(pivots)
    out = R.to_list()[:len(pivots)]
    return np.array([[Fraction(int(e.numerator), int(e.denominator)) for e in row] for row in out],
                    dtype=object).reshape(len(pivots), cols), pivots

def rref(F: FieldSpec, A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form, zero rows dropped, with pivot columns."""
    if A.shape[0] == 0:
        return A.reshape(0, A.shape[1]), []
    return _rref_mod(A, F.prime) if F.is_prime else _rref_qq(A)

def rank(F: FieldSpec, A: np.ndarray) -> int:
    if A.size == 0:
        return 0
    return len(rref(F, A)[1])

def nullspace(F: FieldSpec, A: np.ndarray) -> np.ndarray:
    """Rows spanning {v : A v = 0}."""
    cols = A.shape[1]
    R, pivots = rref(F, A)
    free = [c for c in range(cols) if c not in set(pivots)]
    K = zeros(F, len(free), cols)
    for k, f in enumerate(free):
        K[k, f] = F.one()
        for r, c in enumerate(pivots):
            K[k, c] = F.neg(R[r, f])
    return K

def reduce_rows(F: FieldSpec, V: np.ndarray, R: np.ndarray, pivots: Sequence[int]) -> np.ndarray:
    """Remainders of the rows of V modulo the row space of a reduced echelon matrix R."""
    if not len(pivots) or V.shape[0] == 0:
        return V.copy()
    return reduce_mod(F, V - matmul(F, V[:, list(pivots)], R))

def is_zero(F: FieldSpec, V: np.ndarray) -> bool:
    return not np.any(V != 0)

@dataclass(frozen=True)
class GradedFree:
    """The free module of P(-a_1) + ... + P(-a_k)."""
    weights: Weights
    twists: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'twists', tuple(int(a) for a in self.twists))

    @property
    def rank(self) -> int:
        return len(self.twists)

    def dim(self, d: int) -> int:
        return sum(hilbert_p(self.weights, d - a) for a in self.twists)

    def offsets(self, d: int) -> list[int]:
        out, total = [], 0
        for a in self.twists:
            out.append(total)
            total += hilbert_p(self.weights, d - a)
        return out

    def basis(self, d: int) -> list[tuple[int, tuple]]:
        return [(j, m) for j, a in enumerate(self.twists) for m in monomials_of_degree(self.weights, d - a)]

    def dual(self, shift: int) -> 'GradedFree':
        """Hom(-, P(-shift)) on twists."""
        return GradedFree(self.weights, tuple(shift - a for a in self.twists))

class GradedMatrix:
    """Homogeneous map source -> target; entries[i][j] has degree a_j - b_i."""

    def __init__(self, ring: PolyRing, source: GradedFree, target: GradedFree, entries: Sequence[Sequence[Poly]]):
        self.ring = ring
        self.source = source
        self.target = target
        self.entries = [list(row) for row in entries]
        if len(self.entries) != target.rank or any(len(row) != source.rank for row in self.entries):
            raise ToolkitError(f"entry table must be {target.rank}x{source.rank}")
        for i, b in enumerate(target.twists):
            for j, a in enumerate(source.twists):
                g = self.entries[i][j]
                if not g.is_zero() and g.degree != a - b:
                    raise DegreeMismatchError(f"entry ({i},{j}) has degree {g.degree}, expected {a - b}")

    @classmethod
    def zero(cls, ring: PolyRing, source: GradedFree, target: GradedFree) -> 'GradedMatrix':
        return cls(ring, source, target, [[ring.zero() for _ in source.twists] for _ in target.twists])

    @classmethod
    def identity(cls, ring: PolyRing, free: GradedFree) -> 'GradedMatrix':
        return cls(ring, free, free, [[ring.const(1) if i == j else ring.zero() for j in range(free.rank)]
                                      for i in range(free.rank)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.target.rank, self.source.rank

    def compose(self, other: 'GradedMatrix') -> 'GradedMatrix':
        """self after other."""
        if other.target.twists != self.source.twists:
            raise DegreeMismatchError('composition of incompatible graded maps')
        rows, inner, cols = self.target.rank, self.source.rank, other.source.rank
        out = []
        for i in range(rows):
            row = []
            for k in range(cols):
                acc = self.ring.zero()
                for j in range(inner):
                    a, b = self.entries[i][j], other.entries[j][k]
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return GradedMatrix(self.ring, other.source, self.target, out)

    def dual(self, shift: int) -> 'GradedMatrix':
        """Transpose as the map target^v(-shift) -> source^v(-shift)."""
        entries = [[self.entries[i][j] for i in range(self.target.rank)] for j in range(self.source.rank)]
        return GradedMatrix(self.ring, self.target.dual(shift), self.source.dual(shift), entries)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> 'GradedMatrix':
        return GradedMatrix(self.ring,
                            GradedFree(self.source.weights, tuple(self.source.twists[j] for j in cols)),
                            GradedFree(self.target.weights, tuple(self.target.twists[i] for i in rows)),
                            [[self.entries[i][j] for j in cols] for i in rows])

    def is_zero(self) -> bool:
        return all(g.is_zero() for row in self.entries for g in row)

    def to_json(self) -> dict:
        from ring import format_poly
        return {'weights': list(self.ring.weights), 'field': self.ring.field.name,
                'source': list(self.source.twists), 'target': list(self.target.twists),
                'entries': [[format_poly(g) for g in row] for row in self.entries]}

def free_vector(free: GradedFree, polys: Sequence[Poly], d: int) -> np.ndarray:
    """Coordinates of a degree-d element of a free module in its monomial basis."""
    F = polys[0].ring.field if polys else None
    v = zeros(F, 1, free.dim(d))[0]
    offsets = free.offsets(d)
    w = free.weights
    for j, g in enumerate(polys):
        if g.is_zero():
            continue
        idx = monomial_index(w, d - free.twists[j])
        for m, c in g.terms.items():
            v[offsets[j] + idx[m]] = c
    return v

def vector_polys(ring: PolyRing, free: GradedFree, vec: np.ndarray, d: int) -> list[Poly]:
    """Inverse of free_vector."""
    F = ring.field
    out = []
    offsets = free.offsets(d)
    for j, a in enumerate(free.twists):
        monos = monomials_of_degree(free.weights, d - a)
        segment = vec[offsets[j]:offsets[j] + len(monos)]
        out.append(Poly(ring, {m: F(int(c)) if F.is_prime else c for m, c in zip(monos, segment) if c != 0},
                        d - a if monos else None))
    return out

def degree_piece(M: GradedMatrix, d: int) -> np.ndarray:
    """Field matrix of M in degree d: rows index target_d, columns source_d."""
    F = M.ring.field
    w = M.ring.weights
    src, tgt = M.source, M.target
    A = zeros(F, tgt.dim(d), src.dim(d))
    if A.size == 0:
        return A
    src_off, tgt_off = src.offsets(d), tgt.offsets(d)
    for i, b in enumerate(tgt.twists):
        idx = monomial_index(w, d - b)
        for j, a in enumerate(src.twists):
            entry = M.entries[i][j]
            if entry.is_zero():
                continue
            for k, mono in enumerate(monomials_of_degree(w, d - a)):
                col = src_off[j] + k
                for m, c in entry.terms.items():
                    A[tgt_off[i] + idx[mono_mul(m, mono)], col] += c
    return reduce_mod(F, A)

def rank_and_kernel(M: GradedMatrix, d: int) -> tuple[int, np.ndarray]:
    A = degree_piece(M, d)
    F = M.ring.field
    if A.shape[1] == 0:
        return 0, zeros(F, 0, 0)
    K = nullspace(F, A)
    return A.shape[1] - K.shape[0], K

@dataclass
class Presentation:
    """coker(relations: F1 -> generators)."""
    ring: PolyRing
    generators: GradedFree
    relations: GradedMatrix
    stabilized: bool = True
    bound: Optional[int] = None
    # index of a weight-1 variable acting injectively on the cokernel, if one is known
    regular: Optional[int] = None
    _coker: Optional['RegularModule'] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.relations.target.twists != self.generators.twists:
            raise DegreeMismatchError('relations must map into the generators')

    def cokernel(self) -> 'RegularModule':
        """The presented module built degree by degree; needs `regular`."""
        if self.regular is None:
            raise ToolkitError('the cokernel engine needs a regular variable')
        if self._coker is None:
            gens = self.generators.twists
            rels = [(s, [self.relations.entries[i][j] for i in range(len(gens))])
                    for j, s in enumerate(self.relations.source.twists)]
            self._coker = RegularModule(self.ring, gens, rels, self.regular, 'coker')
        return self._coker

    @classmethod
    def free(cls, ring: PolyRing, twists: Sequence[int]) -> 'Presentation':
        gens = GradedFree(ring.weights, tuple(twists))
        return cls(ring, gens, GradedMatrix.zero(ring, GradedFree(ring.weights, ()), gens))

    def to_json(self) -> dict:
        return {'generators': list(self.generators.twists), 'relations': self.relations.to_json(),
                'stabilized': self.stabilized, 'bound': self.bound, 'regular': self.regular}

def hilbert_of_coker(P: Presentation, d: int) -> int:
    dim = P.generators.dim(d)
    if P.relations.source.rank == 0 or dim == 0:
        return dim
    return dim - rank(P.ring.field, degree_piece(P.relations, d))

@dataclass
class IdealGens:
    ring: PolyRing
    gens: list[Poly]

    def __post_init__(self):
        self.gens = [g for g in self.gens if not g.is_zero()]
        for g in self.gens:
            if not g.is_homogeneous():
                raise DegreeMismatchError('ideal generators must be homogeneous')

    @property
    def degrees(self) -> list[int]:
        return [g.degree for g in self.gens]

class DegreewiseIdeal:
    """Reduced bases of the graded pieces I_d of a homogeneous ideal, cached per degree."""

    def __init__(self, ideal: IdealGens):
        self.ideal = ideal
        self.ring = ideal.ring
        self._pieces: dict[int, tuple[np.ndarray, list[int]]] = {}

    def piece(self, d: int) -> tuple[np.ndarray, list[int]]:
        if d not in self._pieces:
            F, w = self.ring.field, self.ring.weights
            size = hilbert_p(w, d)
            idx = monomial_index(w, d)
            rows = []
            for g in self.ideal.gens:
                for mono in monomials_of_degree(w, d - g.degree):
                    row = zeros(F, 1, size)[0]
                    for m, c in g.terms.items():
                        row[idx[mono_mul(m, mono)]] = c
                    rows.append(row)
            A = np.array(rows).reshape(len(rows), size) if rows else zeros(F, 0, size)
            self._pieces[d] = rref(F, A)
        return self._pieces[d]

    def dim(self, d: int) -> int:
        return len(self.piece(d)[1])

    def quotient_dim(self, d: int) -> int:
        return hilbert_p(self.ring.weights, d) - self.dim(d)

    def contains(self, g: Poly) -> bool:
        if g.is_zero():
            return True
        if not g.is_homogeneous():
            raise DegreeMismatchError('membership needs a homogeneous polynomial')
        d = g.degree
        R, pivots = self.piece(d)
        v = free_vector(GradedFree(self.ring.weights, (0,)), [g], d)[None, :]
        return is_zero(self.ring.field, reduce_rows(self.ring.field, v, R, pivots))

def ideal_membership(g: Poly, I: IdealGens) -> bool:
    """Exact: the degree-d piece of (g_1..g_k) is spanned by the m*g_i."""
    return DegreewiseIdeal(I).contains(g)

@dataclass
class KernelGenerators:
    """Minimal homogeneous generators of a kernel found up to a degree bound."""
    degrees: list[int]
    vectors: list[np.ndarray]
    bound: int
    stabilized: bool

def kernel_generators(F: FieldSpec, w: Weights, source: GradedFree, piece: Callable[[int], np.ndarray],
                      bound: int, label: str = 'syzygies', regular: Optional[int] = None) -> KernelGenerators:
    """Degreewise: a kernel vector is new iff it is independent of P times the earlier generators.

    With `regular` (a weight-1 variable acting injectively on the target) the
    test is done modulo that variable instead, see _kernel_generators_regular.
    """
    if regular is not None:
        return _kernel_generators_regular(F, w, source, piece, bound, label, regular)
    degrees: list[int] = []
    vectors: list[np.ndarray] = []
    start = min(source.twists, default=0)
    dummy_ring = PolyRing(w, F)
    for d in progress(range(start, bound + 1), desc=label):
        if source.dim(d) == 0:
            continue
        A = piece(d)
        K = nullspace(F, A) if A.shape[0] else _identity(F, source.dim(d))
        if K.shape[0] == 0:
            continue
        span_rows = []
        for e, vec in zip(degrees, vectors):
            polys = vector_polys(dummy_ring, source, vec, e)
            for mono in monomials_of_degree(w, d - e):
                mp = dummy_ring.monomial(mono)
                span_rows.append(free_vector(source, [mp * g for g in polys], d))
        S = np.array(span_rows).reshape(len(span_rows), source.dim(d)) if span_rows else zeros(F, 0, source.dim(d))
        R, pivots = rref(F, S)
        new_R, new_piv = rref(F, reduce_rows(F, K, R, pivots))
        for row in new_R:
            degrees.append(d)
            vectors.append(row)
    top = max(w) + 1
    stabilized = all(e <= bound - top for e in degrees)
    return KernelGenerators(degrees, vectors, bound, stabilized)

def _free_of(w: Weights, source: GradedFree, d: int, r: int) -> tuple[list[int], list[tuple[int, tuple]]]:
    """Positions in source_d of the basis monomials without x_r, and their (generator, monomial) keys."""
    keep, keys = [], []
    for j, off in enumerate(source.offsets(d)):
        for idx, m in enumerate(monomials_of_degree(w, d - source.twists[j])):
            if not m[r]:
                keep.append(off + idx)
                keys.append((j, m))
    return keep, keys

def _kernel_generators_regular(F: FieldSpec, w: Weights, source: GradedFree, piece: Callable[[int], np.ndarray],
                               bound: int, label: str, r: int) -> KernelGenerators:
    """Minimal kernel generators when x_r is a nonzerodivisor on the target.

    Then K_d meets x_r * source in x_r * K_{d-1}, so the new generators of
    degree d are read off the images of K_d with the x_r monomials dropped,
    modulo the shifts of the earlier images by the other variables. Only
    those small images are kept between degrees.
    """
    degrees: list[int] = []
    vectors: list[np.ndarray] = []
    images: dict[int, tuple[np.ndarray, list[tuple[int, tuple]]]] = {}
    start = min(source.twists, default=0)
    for d in progress(range(start, bound + 1), desc=label):
        n = source.dim(d)
        if n == 0:
            continue
        keep, keys = _free_of(w, source, d, r)
        index = {key: k for k, key in enumerate(keys)}
        A = piece(d)
        K = nullspace(F, A) if A.shape[0] else _identity(F, n)
        Kbar = K[:, keep]
        shifted = []
        for i in range(len(w)):
            e = d - w[i]
            if i == r or e not in images or not images[e][0].shape[0]:
                continue
            B, lower = images[e]
            block = zeros(F, B.shape[0], len(keep))
            unit = tuple(int(t == i) for t in range(len(w)))
            block[:, [index[(j, mono_mul(m, unit))] for j, m in lower]] = B
            shifted.append(block)
        S = np.vstack(shifted) if shifted else zeros(F, 0, len(keep))
        R, pivots = rref(F, S)
        residue = reduce_rows(F, Kbar, R, pivots)
        images[d] = (rref(F, Kbar)[0], keys)
        if is_zero(F, residue):
            continue
        combined, piv = rref(F, np.hstack([residue, K]))
        for row, c in zip(combined, piv):
            if c >= len(keep):
                break
            degrees.append(d)
            vectors.append(row[len(keep):].copy())
    top = max(w) + 1
    stabilized = all(e <= bound - top for e in degrees)
    return KernelGenerators(degrees, vectors, bound, stabilized)

def _identity(F: FieldSpec, n: int) -> np.ndarray:
    I = zeros(F, n, n)
    for k in range(n):
        I[k, k] = F.one()
    return I

@dataclass
class SyzygyResult:
    matrix: GradedMatrix
    stabilized: bool
    bound: int

def default_bound(w: Weights, twists: Sequence[int]) -> int:
    return max(twists, default=0) + 2 * w.total

def syzygies_up_to(M: GradedMatrix, bound: Optional[int] = None) -> SyzygyResult:
    """Minimal generators of ker M in degrees <= bound, as the columns of a graded matrix into M's source."""
    ring = M.ring
    if bound is None:
        bound = default_bound(ring.weights, M.source.twists)
    gens = kernel_generators(ring.field, ring.weights, M.source, lambda d: degree_piece(M, d), bound)
    cols = [vector_polys(ring, M.source, v, e) for e, v in zip(gens.degrees, gens.vectors)]
    entries = [[cols[k][i] for k in range(len(cols))] for i in range(M.source.rank)]
    syz = GradedMatrix(ring, GradedFree(ring.weights, tuple(gens.degrees)), M.source, entries)
    return SyzygyResult(syz, gens.stabilized, bound)

def free_resolution(P: Presentation, bound: Optional[int] = None, max_length: Optional[int] = None) -> tuple[list[GradedMatrix], bool]:
    """Maps F_1 -> F_0, F_2 -> F_1, ... until a kernel vanishes (length at most n+1 by the syzygy theorem)."""
    ring = P.ring
    if max_length is None:
        max_length = ring.weights.n + 2
    maps = [P.relations] if P.relations.source.rank else []
    stabilized = P.stabilized
    while maps and len(maps) < max_length:
        b = bound if bound is not None else default_bound(ring.weights, maps[-1].source.twists)
        syz = syzygies_up_to(maps[-1], b)
        stabilized = stabilized and syz.stabilized
        if syz.matrix.source.rank == 0:
            break
        maps.append(syz.matrix)
    return maps, stabilized

class ModuleContext:
    """A graded P-module known degreewise: dim(d) and the action of each variable."""
    weights: Weights
    field: FieldSpec

    def dim(self, d: int) -> int:
        raise NotImplementedError

    def act(self, i: int, vec: np.ndarray, d: int) -> np.ndarray:
        raise NotImplementedError

@dataclass
class _Layout:
    """Columns of the degree-d build: symbols v*c, then new generators, then x_r * M_{d-1}."""
    symbols: dict[int, tuple[int, int]]
    generators: dict[int, int]
    nsym: int
    total: int

class RegularModule(ModuleContext):
    """A finitely presented graded module on which a weight-1 variable x_r is injective.

    Generators e_k sit in degrees t_k and each relation is a degree with one
    polynomial per generator. Since x_r is injective, M_d = x_r M_{d-1} + C_d
    for a complement C_d, so the coordinates of M_d are the blocks
    C_0 | C_1 | ... | C_d (block k standing for x_r^(d-k) C_k). Multiplying
    by x_r pads with zeros and every other variable v is stored once, as the
    images v*c for c in C_k.

    Degree d is the span of x_r M_{d-1}, the symbols v*c (c in C_{d-w_v}) and
    the generators of degree d, modulo the commutation rows u*(v*c) = v*(u*c)
    and the relations of degree d. A pivot falling in the x_r M_{d-1} part
    means x_r kills something, and the build stops with an error.
    """

    def __init__(self, ring: PolyRing, generators: Sequence[int],
                 relations: Sequence[tuple[int, Sequence[Poly]]], regular: int, name: str = 'M'):
        if ring.weights[regular] != 1:
            raise ToolkitError(f"{name}: {ring.names[regular]} has weight {ring.weights[regular]}, need 1")
        self.ring = ring
        self.field = ring.field
        self.weights = ring.weights
        self.name = name
        self.regular = regular
        self.others = [v for v in range(ring.nvars) if v != regular]
        self.generators = tuple(int(t) for t in generators)
        self.relations: dict[int, list[list[Poly]]] = {}
        for d, polys in relations:
            if len(polys) != len(self.generators):
                raise DegreeMismatchError(f"{name}: relation has {len(polys)} entries for {len(self.generators)} generators")
            for g, t in zip(polys, self.generators):
                if not g.is_zero() and g.degree != d - t:
                    raise DegreeMismatchError(f"{name}: entry {g} has degree {g.degree}, expected {d - t}")
            if any(not g.is_zero() for g in polys):
                self.relations.setdefault(d, []).append(list(polys))
        self._sizes: list[int] = []
        self._dims: list[int] = []
        self._images: dict[tuple[int, int], np.ndarray] = {}
        self._gens: dict[int, np.ndarray] = {}
        self._mono: dict[tuple[int, tuple], np.ndarray] = {}
        self._top = -1

    def dim(self, d: int) -> int:
        if d < 0:
            return 0
        self.ensure(d)
        return self._dims[d]

    def hilbert(self, degrees: Sequence[int]) -> list[int]:
        return [self.dim(d) for d in degrees]

    def ensure(self, d: int):
        while self._top < d:
            self._build(self._top + 1)
            self._top += 1

    def _built(self, e: int) -> int:
        return self._dims[e] if e >= 0 else 0

    def act_many(self, v: int, V: np.ndarray, e: int) -> np.ndarray:
        """x_v times each column of V, a matrix of vectors in M_e."""
        F = self.field
        target = e + self.weights[v]
        out = zeros(F, self.dim(target), V.shape[1])
        if e < 0 or V.shape[0] == 0:
            return out
        if v == self.regular:
            out[:V.shape[0]] = V
            return out
        start = 0
        for k in range(e + 1):
            size = self._sizes[k]
            if size:
                Y = self._images[(v, k)]
                out[:Y.shape[0]] += matmul(F, Y, V[start:start + size])
            start += size
        return reduce_mod(F, out)

    def act(self, i: int, vec: np.ndarray, d: int) -> np.ndarray:
        return self.act_many(i, vec[:, None], d)[:, 0]

    def mult_var(self, v: int, e: int) -> np.ndarray:
        """Matrix of x_v from M_e to M_{e+w_v}."""
        F = self.field
        out = zeros(F, self.dim(e + self.weights[v]), self.dim(e))
        if e < 0:
            return out
        if v == self.regular:
            out[:self._dims[e]] = _identity(F, self._dims[e])
            return out
        start = 0
        for k in range(e + 1):
            size = self._sizes[k]
            if size:
                Y = self._images[(v, k)]
                out[:Y.shape[0], start:start + size] = Y
            start += size
        return out

    def generator_vector(self, k: int) -> np.ndarray:
        self.ensure(self.generators[k])
        return self._gens[k]

    def monomial_vector(self, k: int, m: tuple) -> np.ndarray:
        """m * e_k, cached; meant for the moderate degrees of the relations."""
        m = tuple(m)
        if not any(m):
            return self.generator_vector(k)
        key = (k, m)
        if key not in self._mono:
            v = self.regular if m[self.regular] else next(t for t, x in enumerate(m) if x)
            lower = m[:v] + (m[v] - 1,) + m[v + 1:]
            self._mono[key] = self.act(v, self.monomial_vector(k, lower),
                                       self.generators[k] + weighted_degree(self.weights, lower))
        return self._mono[key]

    def apply(self, g: Poly, k: int) -> np.ndarray:
        """g * e_k in M_{deg g + t_k} for a homogeneous g.

        Powers of x_r only pad, so the products are taken on the x_r-free part
        of each monomial, sharing every intermediate product.
        """
        F, r = self.field, self.regular
        t = self.generators[k]
        if g.is_zero():
            return zeros(F, 1, self.dim(t + (g.degree or 0)))[0]
        if not g.is_homogeneous():
            raise DegreeMismatchError('apply needs a homogeneous polynomial')
        d = g.degree + t
        out = zeros(F, 1, self.dim(d))[0]
        cache: dict[tuple, np.ndarray] = {}

        def vec(m: tuple) -> np.ndarray:
            if not any(m):
                return self.generator_vector(k)
            if m not in cache:
                v = next(i for i, x in enumerate(m) if x)
                lower = m[:v] + (m[v] - 1,) + m[v + 1:]
                cache[m] = self.act(v, vec(lower), t + weighted_degree(self.weights, lower))
            return cache[m]

        for m, c in g.terms.items():
            y = vec(m[:r] + (0,) + m[r + 1:])
            out[:len(y)] = reduce_mod(F, out[:len(y)] + y * c)
        return out

    def _lift(self, u: int, Y: np.ndarray, e: int, layout: _Layout) -> np.ndarray:
        """Rows of the degree-(e + w_u) build holding u*y for the columns y of Y (vectors of M_e)."""
        F = self.field
        out = zeros(F, Y.shape[1], layout.total)
        if u == self.regular:
            out[:, layout.nsym:layout.nsym + Y.shape[0]] = Y.T
            return out
        below = self._built(e - 1)
        if below:
            image = self.act_many(u, Y[:below], e - 1)
            out[:, layout.nsym:layout.nsym + image.shape[0]] = image.T
        if self._sizes[e]:
            start, size = layout.symbols[u]
            out[:, start:start + size] = Y[below:].T
        return out

    def _relation_row(self, rel: Sequence[Poly], d: int, layout: _Layout) -> np.ndarray:
        F, w = self.field, self.weights
        row = zeros(F, 1, layout.total)
        by_var: dict[int, np.ndarray] = {}
        for k, g in enumerate(rel):
            for m, c in g.terms.items():
                if not any(m):
                    row[0, layout.generators[k]] = reduce_mod(F, row[0, layout.generators[k]] + c)
                    continue
                u = self.regular if m[self.regular] else next(t for t, x in enumerate(m) if x)
                lower = m[:u] + (m[u] - 1,) + m[u + 1:]
                y = self.monomial_vector(k, lower) * c
                by_var[u] = reduce_mod(F, by_var[u] + y) if u in by_var else reduce_mod(F, y)
        for u, y in by_var.items():
            row = reduce_mod(F, row + self._lift(u, y[:, None], d - w[u], layout))
        return row

    def _build(self, d: int):
        F, w = self.field, self.weights
        top = self._built(d - 1)
        symbols, cols = {}, 0
        for v in self.others:
            k = d - w[v]
            if k >= 0 and self._sizes[k]:
                symbols[v] = (cols, self._sizes[k])
                cols += self._sizes[k]
        generators = {}
        for g, t in enumerate(self.generators):
            if t == d:
                generators[g] = cols
                cols += 1
        layout = _Layout(symbols, generators, cols, cols + top)
        rows = []
        for a, u in enumerate(self.others):
            for v in self.others[a + 1:]:
                e = d - w[u] - w[v]
                if e < 0 or not self._sizes[e]:
                    continue
                rows.append(reduce_mod(F, self._lift(u, self._images[(v, e)], e + w[v], layout)
                                       - self._lift(v, self._images[(u, e)], e + w[u], layout)))
        for rel in self.relations.get(d, []):
            rows.append(self._relation_row(rel, d, layout))
        A = np.vstack(rows) if rows else zeros(F, 0, layout.total)
        R, pivots = rref(F, A)
        if pivots and pivots[-1] >= layout.nsym:
            raise ToolkitError(f"{self.name}: {self.ring.names[self.regular]} is a zero divisor in degree {d}")
        pivot_set = set(pivots)
        free = [c for c in range(layout.nsym) if c not in pivot_set]
        Pi = zeros(F, top + len(free), layout.nsym)
        for j, c in enumerate(free):
            Pi[top + j, c] = F.one()
        if pivots:
            Pi[top:, pivots] = reduce_mod(F, -R[:, free].T)
            Pi[:top, pivots] = reduce_mod(F, -R[:, layout.nsym:].T)
        self._sizes.append(len(free))
        self._dims.append(top + len(free))
        for v in self.others:
            k = d - w[v]
            if k < 0:
                continue
            if v in symbols:
                start, size = symbols[v]
                self._images[(v, k)] = Pi[:, start:start + size].copy()
            else:
                self._images[(v, k)] = zeros(F, top + len(free), 0)
        for g, c in generators.items():
            self._gens[g] = Pi[:, c].copy()

def minimal_presentation(gens: Sequence[tuple[int, np.ndarray]], ambient: ModuleContext, bound: int,
                         regular: Optional[int] = None) -> Presentation:
    """Presentation of the submodule of `ambient` generated by vectors of given degrees."""
    F, w = ambient.field, ambient.weights
    ring = PolyRing(w, F)
    source = GradedFree(w, tuple(d for d, _ in gens))
    cache: dict = {}

    def image(k: int, mono: tuple) -> np.ndarray:
        key = (k, mono)
        if key not in cache:
            if not any(mono):
                cache[key] = gens[k][1]
            else:
                i = next(t for t, e in enumerate(mono) if e)
                lower = mono[:i] + (mono[i] - 1,) + mono[i + 1:]
                cache[key] = ambient.act(i, image(k, lower), gens[k][0] + weighted_degree(w, lower))
        return cache[key]

    def piece(d: int) -> np.ndarray:
        cols = []
        for k, (e, _) in enumerate(gens):
            for mono in monomials_of_degree(w, d - e):
                cols.append(image(k, mono))
        if not cols:
            return zeros(F, ambient.dim(d), 0)
        return np.array(cols).reshape(len(cols), ambient.dim(d)).T.copy()

    kg = kernel_generators(F, w, source, piece, bound, label='relations', regular=regular)
    cols = [vector_polys(ring, source, v, e) for e, v in zip(kg.degrees, kg.vectors)]
    entries = [[cols[k][i] for k in range(len(cols))] for i in range(source.rank)]
    rel = GradedMatrix(ring, GradedFree(w, tuple(kg.degrees)), source, entries)
    return Presentation(ring, source, rel, kg.stabilized, bound, regular)

class GradedQuotient:
    """R = K[vars]/I one degree at a time.

    R_d is built as the sum over variables v of copies of R_{d-w_v} (the
    element v*e for e in a basis of R_{d-w_v}), cut down by the commutation
    rows u*(v*e) = v*(u*e) and by the relations of degree exactly d. Lower
    relations are already zero in the lower pieces. The non-pivot columns of
    the reduced echelon form give the basis of R_d and the projection gives
    the multiplication maps R_{d-w_v} -> R_d.

    With `regular` (a weight-1 variable that is a nonzerodivisor on R) the
    pieces come from a RegularModule instead, which keeps the rows down to
    the complement of x_r R_{d-1}.
    """

    def __init__(self, ring: PolyRing, relations: Sequence[Poly], name: str = 'R',
                 regular: Optional[int] = None):
        self.ring = ring
        self.field = ring.field
        self.weights = ring.weights
        self.name = name
        self.relations: dict[int, list[Poly]] = {}
        for g in relations:
            if g.is_zero():
                continue
            if not g.is_homogeneous():
                raise DegreeMismatchError(f"relation {g} is not homogeneous")
            self.relations.setdefault(g.degree, []).append(g)
        self._dims = {0: 1}
        self._mult: dict[tuple[int, int], np.ndarray] = {}
        self._mono: dict[tuple, np.ndarray] = {(0,) * ring.nvars: _identity(self.field, 1)[0]}
        self._top = 0
        self._module: Optional[RegularModule] = None
        if regular is not None:
            rels = [(d, [g]) for d, gs in self.relations.items() for g in gs]
            self._module = RegularModule(ring, (0,), rels, regular, name)

    def dim(self, d: int) -> int:
        if d < 0:
            return 0
        if self._module is not None:
            return self._module.dim(d)
        self.ensure(d)
        return self._dims[d]

    def hilbert(self, degrees: Sequence[int]) -> list[int]:
        return [self.dim(d) for d in degrees]

    def ensure(self, d: int):
        if self._module is not None:
            self._module.ensure(d)
            return
        while self._top < d:
            self._build(self._top + 1)
            self._top += 1

    def _build(self, d: int):
        F, w = self.field, self.weights
        nv = self.ring.nvars
        blocks, size = {}, 0
        for v in range(nv):
            k = self.dim(d - w[v])
            if k:
                blocks[v] = (size, k)
                size += k
        if size == 0:
            self._dims[d] = 0
            for v in range(nv):
                self._mult[(v, d - w[v])] = zeros(F, 0, self.dim(d - w[v]))
            return
        rows = []
        for u in range(nv):
            for v in range(u + 1, nv):
                e = d - w[u] - w[v]
                k = self.dim(e)
                if not k:
                    continue
                block = zeros(F, k, size)
                ou, ku = blocks[u]
                ov, kv = blocks[v]
                block[:, ou:ou + ku] = self._mult[(v, e)].T
                block[:, ov:ov + kv] = reduce_mod(F, -self._mult[(u, e)].T)
                rows.append(block)
        for g in self.relations.get(d, []):
            row = zeros(F, 1, size)
            for m, c in g.terms.items():
                v = next(t for t, x in enumerate(m) if x)
                lower = m[:v] + (m[v] - 1,) + m[v + 1:]
                if v not in blocks:
                    continue
                off, k = blocks[v]
                row[0, off:off + k] = reduce_mod(F, row[0, off:off + k] + self.monomial_vector(lower) * c)
            rows.append(row)
        A = np.vstack(rows) if rows else zeros(F, 0, size)
        R, pivots = rref(F, A)
        pivot_set = set(pivots)
        nonpiv = [c for c in range(size) if c not in pivot_set]
        Pi = zeros(F, len(nonpiv), size)
        for k, c in enumerate(nonpiv):
            Pi[k, c] = F.one()
        if pivots:
            Pi[:, pivots] = reduce_mod(F, -R[:, nonpiv].T)
        self._dims[d] = len(nonpiv)
        for v in range(nv):
            if v in blocks:
                off, k = blocks[v]
                self._mult[(v, d - w[v])] = Pi[:, off:off + k]
            else:
                self._mult[(v, d - w[v])] = zeros(F, len(nonpiv), 0)

    def mult_var(self, v: int, e: int) -> np.ndarray:
        """Matrix of multiplication by variable v from R_e to R_{e+w_v}."""
        if self._module is not None:
            return self._module.mult_var(v, e)
        self.ensure(e + self.weights[v])
        if e < 0:
            return zeros(self.field, self.dim(e + self.weights[v]), 0)
        return self._mult[(v, e)]

    def monomial_vector(self, m: tuple) -> np.ndarray:
        m = tuple(m)
        if self._module is not None:
            return self._module.monomial_vector(0, m)
        if m not in self._mono:
            v = next(t for t, x in enumerate(m) if x)
            lower = m[:v] + (m[v] - 1,) + m[v + 1:]
            e = weighted_degree(self.weights, lower)
            self._mono[m] = reduce_mod(self.field, self.mult_var(v, e) @ self.monomial_vector(lower)) \
                if self.field.is_prime else self.mult_var(v, e).dot(self.monomial_vector(lower))
        return self._mono[m]

    def normal_form(self, g: Poly, degree: Optional[int] = None) -> np.ndarray:
        """Coordinates of the class of a homogeneous polynomial in the basis of R_deg."""
        d = g.degree if degree is None else degree
        if d is None:
            raise DegreeMismatchError('normal_form needs a homogeneous polynomial')
        v = zeros(self.field, 1, self.dim(d))[0]
        for m, c in g.terms.items():
            v = v + self.monomial_vector(m) * c
        return reduce_mod(self.field, v)

    def mult_matrix(self, g: Poly, e: int) -> np.ndarray:
        """Matrix of multiplication by a homogeneous g from R_e to R_{e+deg g}."""
        F = self.field
        d = g.degree
        out = zeros(F, self.dim(e + d), self.dim(e))
        for m, c in g.terms.items():
            M = _identity(F, self.dim(e))
            cur = e
            for v, k in enumerate(m):
                for _ in range(k):
                    M = matmul(F, self.mult_var(v, cur), M)
                    cur += self.weights[v]
            out = reduce_mod(F, out + M * c)
        return out

    def span(self, elements: Sequence[np.ndarray], d: int) -> tuple[np.ndarray, list[int]]:
        """Echelon basis of the span of vectors in R_d."""
        A = np.array(list(elements)).reshape(len(elements), self.dim(d)) if len(elements) else zeros(self.field, 0, self.dim(d))
        return rref(self.field, A)

    def p_module(self, images: Sequence[Poly]) -> 'QuotientModule':
        """R as a module over the polynomial ring whose variables act through `images`."""
        return QuotientModule(self, images)

class QuotientModule(ModuleContext):
    def __init__(self, quotient: GradedQuotient, images: Sequence[Poly]):
        self.quotient = quotient
        self.images = list(images)
        self.field = quotient.field
        self.weights = Weights(tuple(g.degree for g in self.images))
        self._mats: dict[tuple[int, int], np.ndarray] = {}

    def dim(self, d: int) -> int:
        return self.quotient.dim(d)

    def matrix(self, i: int, d: int) -> np.ndarray:
        if (i, d) not in self._mats:
            self._mats[(i, d)] = self.quotient.mult_matrix(self.images[i], d)
        return self._mats[(i, d)]

    def act(self, i: int, vec: np.ndarray, d: int) -> np.ndarray:
        M = self.matrix(i, d)
        return reduce_mod(self.field, M @ vec) if self.field.is_prime else M.dot(vec)

import unittest
from hypothesis import given, settings, strategies as st

W = Weights((1, 1, 2, 3))
GF = FieldSpec(65521)

def _row(ring, polys, twist=0):
    """1 x k graded matrix P(-a_j) -> P(-twist)."""
    src = GradedFree(ring.weights, tuple(g.degree + twist for g in polys))
    return GradedMatrix(ring, src, GradedFree(ring.weights, (twist,)), [list(polys)])

class TestLinearAlgebra(unittest.TestCase):
    def test_rref_and_nullspace_mod_p(self):
        A = as_matrix(GF, [[1, 2, 3], [2, 4, 6], [0, 1, 1]])
        R, piv = rref(GF, A)
        self.assertEqual(piv, [0, 1])
        K = nullspace(GF, A)
        self.assertEqual(K.shape, (1, 3))
        self.assertTrue(is_zero(GF, matmul(GF, A, K.T)))

    def test_rref_rationals(self):
        Q = FieldSpec(None)
        A = as_matrix(Q, [[2, 4], [1, 3]])
        R, piv = rref(Q, A)
        self.assertEqual(piv, [0, 1])
        self.assertEqual(R[0, 0], 1)
        self.assertEqual(rank(Q, as_matrix(Q, [[1, 2], [Fraction(1, 2), 1]])), 1)

    def test_matmul_exact(self):
        A = np.full((3, 700), GF.prime - 1, dtype=np.int64)
        B = np.full((700, 2), GF.prime - 1, dtype=np.int64)
        self.assertEqual(int(matmul(GF, A, B)[0, 0]), 700 % GF.prime)

class TestGradedMaps(unittest.TestCase):
    def setUp(self):
        self.R = PolyRing(W, GF)
        self.x = self.R.gens()

    def test_degree_piece_koszul_first_map(self):
        row = _row(self.R, self.x)
        A = degree_piece(row, 1)
        self.assertEqual(A.shape, (2, 2))
        self.assertEqual(rank(GF, A), 2)
        self.assertTrue(is_zero(GF, degree_piece(GradedMatrix.zero(self.R, row.source, row.target), 3)))
        ident = GradedMatrix.identity(self.R, GradedFree(W, (2,)))
        self.assertEqual(degree_piece(ident, 2).tolist(), [[1]])

    def test_kernel_degree_two(self):
        row = _row(self.R, self.x)
        r, K = rank_and_kernel(row, 2)
        self.assertEqual(K.shape[0], 1)
        polys = vector_polys(self.R, row.source, K[0], 2)
        # the single degree-2 syzygy is proportional to (x1, -x0, 0, 0)
        self.assertTrue(polys[2].is_zero() and polys[3].is_zero())
        self.assertEqual((polys[0] * self.x[0] + polys[1] * self.x[1]).is_zero(), True)
        below = rank_and_kernel(row, 0)[1]
        self.assertEqual(below.shape[0], 0)

    def test_composition_respects_pieces(self):
        x0, x1, x2, x3 = self.x
        A = _row(self.R, [x1, x0 * x0])
        B = GradedMatrix(self.R, GradedFree(W, (3,)), A.source, [[x2], [x1]])
        C = A.compose(B)
        for d in range(0, 8):
            lhs = degree_piece(C, d)
            rhs = matmul(GF, degree_piece(A, d), degree_piece(B, d))
            self.assertTrue(np.array_equal(lhs, rhs))

    def test_hilbert_of_coker(self):
        for w in [(1, 1, 1, 1), (1, 1, 2, 3), (1, 2, 3), (2, 3, 5)]:
            ring = PolyRing(Weights(w), GF)
            P = Presentation(ring, GradedFree(ring.weights, (0,)), _row(ring, ring.gens()))
            self.assertEqual([hilbert_of_coker(P, d) for d in range(13)], [1] + [0] * 12)
        free = Presentation.free(self.R, (0, 2))
        self.assertEqual(hilbert_of_coker(free, 3), hilbert_p(W, 3) + hilbert_p(W, 1))

    def test_membership(self):
        x0, x1, x2, x3 = self.x
        I = IdealGens(self.R, [x0, x1])
        self.assertFalse(ideal_membership(x2, I))
        self.assertTrue(ideal_membership(x0 * x1, IdealGens(self.R, [x0])))
        self.assertTrue(ideal_membership(x2 * x0 + x3 * x1, I))
        with self.assertRaises(DegreeMismatchError):
            ideal_membership(Poly(self.R, {(1, 0, 0, 0): 1, (0, 0, 1, 0): 1}), I)

    @given(st.lists(st.integers(0, 65520), min_size=6, max_size=6), st.integers(2, 8))
    @settings(max_examples=15, deadline=None)
    def test_membership_matches_brute_force(self, coeffs, d):
        x0, x1, x2, x3 = self.x
        g1 = x0 * x1.scale(coeffs[0]) + x2.scale(coeffs[1])
        g2 = x3 + x0 * x2.scale(coeffs[2])
        I = IdealGens(self.R, [g1, g2])
        target = (g1 * self.R.monomial(monomials_of_degree(W, d - 2)[0])).scale(coeffs[3] + 1)
        self.assertTrue(ideal_membership(target, I))
        # brute force: the span of all multiples has the expected rank
        span = DegreewiseIdeal(I).dim(d)
        rows = [free_vector(GradedFree(W, (0,)), [self.R.monomial(m) * g], d)
                for g in I.gens for m in monomials_of_degree(W, d - g.degree)]
        self.assertEqual(span, rank(GF, np.array(rows)) if rows else 0)

    def test_syzygies_of_variables(self):
        row = _row(self.R, self.x)
        res = syzygies_up_to(row, 10)
        self.assertEqual(sorted(res.matrix.source.twists), [2, 3, 3, 4, 4, 5])
        self.assertTrue(res.stabilized)
        self.assertTrue(row.compose(res.matrix).is_zero())
        again = syzygies_up_to(row, 12)
        self.assertEqual(sorted(again.matrix.source.twists), [2, 3, 3, 4, 4, 5])

    def test_syzygies_trivial_cases(self):
        x0 = self.x[0]
        inj = _row(self.R, [x0])
        self.assertEqual(syzygies_up_to(inj, 6).matrix.source.rank, 0)
        zero = GradedMatrix.zero(self.R, GradedFree(W, (1, 2)), GradedFree(W, (0,)))
        self.assertEqual(list(syzygies_up_to(zero, 6).matrix.source.twists), [1, 2])

    def test_free_resolution_of_residue_field(self):
        ring = PolyRing(Weights((1, 2, 3)), GF)
        P = Presentation(ring, GradedFree(ring.weights, (0,)), _row(ring, ring.gens()))
        maps, stabilized = free_resolution(P)
        self.assertEqual([m.source.rank for m in maps], [3, 3, 1])
        self.assertTrue(stabilized)

class TestGradedQuotient(unittest.TestCase):
    def test_polynomial_ring_dims(self):
        R = PolyRing(W, GF)
        Q = GradedQuotient(R, [])
        self.assertEqual(Q.hilbert(range(8)), [hilbert_p(W, d) for d in range(8)])

    def test_hypersurface(self):
        R = PolyRing(Weights((1, 1, 1)), GF)
        x, y, z = R.gens()
        Q = GradedQuotient(R, [x * y - z * z])
        self.assertEqual(Q.hilbert(range(6)), [1, 3, 5, 7, 9, 11])
        self.assertTrue(is_zero(GF, Q.normal_form(x * y - z * z)))
        self.assertFalse(is_zero(GF, Q.normal_form(x * z)))
        # multiplication maps agree with normal forms of products
        v = Q.normal_form(x * x + y * z)
        lhs = reduce_mod(GF, Q.mult_matrix(z, 2) @ v)
        self.assertTrue(np.array_equal(lhs, Q.normal_form(x * x * z + y * z * z)))

    def test_minimal_presentation(self):
        R = PolyRing(W, GF)
        x0, x1, x2, x3 = R.gens()
        Q = GradedQuotient(R, [])
        module = Q.p_module(R.gens())
        P = minimal_presentation([(0, Q.normal_form(R.const(1)))], module, 6)
        self.assertEqual(P.relations.source.rank, 0)
        P2 = minimal_presentation([(1, Q.normal_form(x0)), (1, Q.normal_form(x1))], module, 8)
        self.assertEqual(list(P2.relations.source.twists), [2])
        self.assertTrue(P2.stabilized)

    def test_presentation_modulo_regular_variable(self):
        R = PolyRing(W, GF)
        x0, x1, x2, x3 = R.gens()
        Q = GradedQuotient(R, [x1 * x3 - x2 * x2])
        module = Q.p_module(R.gens())
        gens = [(0, Q.normal_form(R.const(1))), (1, Q.normal_form(x1)), (2, Q.normal_form(x2))]
        plain = minimal_presentation(gens, module, 10)
        fast = minimal_presentation(gens, module, 10, regular=0)
        self.assertEqual(sorted(fast.relations.source.twists), sorted(plain.relations.source.twists))
        self.assertEqual(fast.regular, 0)
        self.assertEqual([hilbert_of_coker(fast, d) for d in range(10)], Q.hilbert(range(10)))

class TestRegularModule(unittest.TestCase):
    def test_quotient_ring_matches_generic_build(self):
        R = PolyRing(Weights((1, 1, 1)), GF)
        x, y, z = R.gens()
        rel = x * y - z * z
        slow = GradedQuotient(R, [rel])
        fast = GradedQuotient(R, [rel], regular=0)
        self.assertEqual(fast.hilbert(range(8)), slow.hilbert(range(8)))
        self.assertTrue(is_zero(GF, fast.normal_form(x * x * y - x * z * z)))
        self.assertFalse(is_zero(GF, fast.normal_form(y * y * z)))
        v = fast.normal_form(y * y + x * z)
        lhs = reduce_mod(GF, fast.mult_matrix(y, 2) @ v)
        self.assertTrue(np.array_equal(lhs, fast.normal_form(y * y * y + x * y * z)))

    def test_weighted_quotient_ring(self):
        R = PolyRing(W, GF)
        x0, x1, x2, x3 = R.gens()
        rels = [x1 ** 4 - x2 * x2 + x0 * x3, x3 * x3 - x1 ** 6]
        slow = GradedQuotient(R, rels)
        fast = GradedQuotient(R, rels, regular=0)
        self.assertEqual(fast.hilbert(range(13)), slow.hilbert(range(13)))

    def test_rational_field(self):
        Q = FieldSpec(None)
        R = PolyRing(Weights((1, 1, 2)), Q)
        x, y, z = R.gens()
        fast = GradedQuotient(R, [z * z - x * y * z + y ** 4], regular=0)
        slow = GradedQuotient(R, [z * z - x * y * z + y ** 4])
        self.assertEqual(fast.hilbert(range(9)), slow.hilbert(range(9)))

    def test_zero_divisor_is_reported(self):
        R = PolyRing(Weights((1, 1)), GF)
        x, y = R.gens()
        Q = GradedQuotient(R, [x * y], regular=0)
        self.assertEqual(Q.dim(1), 2)
        with self.assertRaises(ToolkitError):
            Q.dim(2)
        with self.assertRaises(ToolkitError):
            GradedQuotient(PolyRing(W, GF), [], regular=2)

    def test_cokernel_of_presentation(self):
        R = PolyRing(W, GF)
        x0, x1, x2, x3 = R.gens()
        P = Presentation(R, GradedFree(W, (0,)), _row(R, [x1]), regular=0)
        M = P.cokernel()
        self.assertEqual(M.hilbert(range(12)), [hilbert_p(Weights((1, 2, 3)), d) for d in range(12)])
        self.assertTrue(is_zero(GF, M.apply(x1 * x2 + x0 * x0 * x1, 0)))
        self.assertFalse(is_zero(GF, M.apply(x2 * x3 + x0 ** 5, 0)))
        with self.assertRaises(ToolkitError):
            Presentation(R, GradedFree(W, (0,)), _row(R, [x1])).cokernel()

    def test_cokernel_with_two_generators(self):
        R = PolyRing(W, GF)
        x0, x1, x2, x3 = R.gens()
        # P(-1) + P(-2) modulo x2*e0 - x1*e1 and x3*e0 - x2*e1
        gens = GradedFree(W, (1, 2))
        rel = GradedMatrix(R, GradedFree(W, (3, 4)), gens, [[x2, x3], [-x1, -x2]])
        P = Presentation(R, gens, rel, regular=0)
        self.assertEqual(P.cokernel().hilbert(range(10)), [hilbert_of_coker(P, d) for d in range(10)])
        self.assertTrue(is_zero(GF, reduce_mod(GF, P.cokernel().apply(x2, 0) - P.cokernel().apply(x1, 1))))

    @given(st.integers(1, 65520), st.integers(1, 65520))
    @settings(max_examples=5, deadline=None)
    def test_action_commutes(self, a, b):
        R = PolyRing(W, GF)
        x0, x1, x2, x3 = R.gens()
        Q = GradedQuotient(R, [x1 * x2 - x3.scale(a) - x0 ** 3, x2 * x2 + x1 * x3.scale(b)], regular=0)
        v = Q.normal_form(x1 * x1 + x2, 2)[:, None]
        lhs = matmul(GF, Q.mult_var(2, 5), matmul(GF, Q.mult_var(3, 2), v))
        rhs = matmul(GF, Q.mult_var(3, 4), matmul(GF, Q.mult_var(2, 2), v))
        self.assertTrue(np.array_equal(lhs, rhs))
        self.assertTrue(np.array_equal(Q.normal_form(x3 * x2 * (x1 * x1 + x2))[:, None], lhs))

if __name__ == '__main__':
    unittest.main()
