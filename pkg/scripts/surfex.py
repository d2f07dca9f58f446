"""
The surface with p_g = q = 2, K^2 = 4 mapped to P(1,1,2,3).

Its canonical ring is a double cover of the ring of theta functions of a
principally polarized abelian surface, the Jacobian of the genus 2 curve
z^2 = y^5 + lam y^4 + mu y^3 + nu y^2 + eps y, branched along
s = rho2 + a rho0 + b rho1 + c theta^2. This module builds the rings from the
relation lists in data/, evaluates the theta functions at points of the
symmetric square of the curve, and checks the 12x12 symmetric matrix whose
cokernel is the pushforward of the structure sheaf.
"""
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import ClassVar, Optional, Sequence

import numpy as np
import sympy
from sympy.ntheory.residue_ntheory import sqrt_mod
from sympy.parsing.sympy_parser import parse_expr

from beilinson import Bundle, CoeffVector, E_of_phi, InvariantData, SheafKind, compute_coeffs, det_degree_of
from common import (EVIDENCE, PAPER_SUPPLIED, REPORT_SCHEMA, RESOLVED, CheckResult, ConfigError,
                    DataFormatError, DegreeMismatchError, FieldSpec, Timer, ToolkitError, banner, check,
                    info, make_rng)
from gla import GradedFree, GradedMatrix, GradedQuotient, Presentation, matmul, minimal_presentation, rank, rref, zeros
from koszul import subsets
from rescheck import (BundleMap, annihilation_at_points, annihilation_check, chart_det, chart_reduce,
                      check_minimal, check_row_kernel, check_symmetric, depth_check, euler_exactness, proportional,
                      random_symmetric_chart, rank_condition)
from ring import (Poly, PolyRing, Weights, dehomogenize, format_poly, monomials_of_degree, poly_from_expr,
                  rehomogenize)

DATA_DIR = Path(__file__).resolve().parent.parent / 'data'

EXAMPLE_WEIGHTS = Weights((1, 1, 2, 3))
EXAMPLE_INVARIANTS = InvariantData(pg=2, q=2, K2=4, chi=1)

PARAM_NAMES = ('lam', 'mu', 'nu', 'eps', 'a', 'b', 'c', 's2')

CURVE_NAMES = ('r0', 'r1', 'r2', 's0', 's1', 's2', 's3', 'z', 't0', 't1')
CURVE_WEIGHTS = (2, 2, 2, 3, 3, 3, 3, 3, 4, 4)
THETA_NAMES = ('theta', 'rho0', 'rho1', 'rho2', 'sigma0', 'sigma1', 'sigma2', 'sigma3', 'zeta', 'tau0', 'tau1')
THETA_WEIGHTS = (1, 2, 2, 2, 3, 3, 3, 3, 3, 4, 4)
CANONICAL_NAMES = ('xi', 'theta', 'rho0', 'rho1', 'sigma0', 'sigma1', 'sigma2', 'sigma3', 'zeta', 'tau0', 'tau1')
CANONICAL_WEIGHTS = (1, 1, 2, 2, 3, 3, 3, 3, 3, 4, 4)

SYMBOLS = {name: sympy.Symbol(name) for name in
           set(PARAM_NAMES) | set(CURVE_NAMES) | set(THETA_NAMES) | set(CANONICAL_NAMES) | {'x0', 'x1', 'x2', 'x3'}}

# -- parameters ----------------------------------------------------------------

@dataclass(frozen=True)
class ParamSet:
    """Curve coefficients lam..eps with 1 + lam + mu + nu + eps = 0, and the branch section
    s = s2 rho2 + a rho0 + b rho1 + c theta^2 (s2 = 1 in normal form)."""
    field: FieldSpec
    lam: object
    mu: object
    nu: object
    eps: object
    a: object
    b: object
    c: object
    s2: object = 1
    seed: Optional[int] = None

    def __post_init__(self):
        F = self.field
        for name in PARAM_NAMES:
            object.__setattr__(self, name, F(getattr(self, name)))
        total = F.one()
        for x in (self.lam, self.mu, self.nu, self.eps):
            total = F.add(total, x)
        if total != 0:
            raise ConfigError(f"1 + lam + mu + nu + eps = {total}, must vanish")

    @classmethod
    def random(cls, field_spec: FieldSpec, seed: int = 0) -> 'ParamSet':
        """Uniform parameters subject to the constraint, redrawn until the quintic is squarefree."""
        F = field_spec
        rng = make_rng(seed)
        while True:
            lam, mu, nu = F.random(rng), F.random(rng), F.random(rng)
            eps = F.sub(F.neg(F.one()), F.add(F.add(lam, mu), nu))
            p = cls(F, lam, mu, nu, eps, F.random(rng), F.random(rng), F.random(rng), seed=seed)
            if p.is_smooth():
                return p

    def with_values(self, **values) -> 'ParamSet':
        current = {name: getattr(self, name) for name in PARAM_NAMES}
        current.update(values)
        return ParamSet(self.field, seed=self.seed, **current)

    def sympy_values(self) -> dict:
        out = {}
        for name in PARAM_NAMES:
            v = getattr(self, name)
            out[SYMBOLS[name]] = sympy.Integer(v) if self.field.is_prime else sympy.Rational(v.numerator, v.denominator)
        return out

    def quintic(self) -> sympy.Expr:
        y = sympy.Symbol('y')
        v = self.sympy_values()
        return y ** 5 + v[SYMBOLS['lam']] * y ** 4 + v[SYMBOLS['mu']] * y ** 3 + v[SYMBOLS['nu']] * y ** 2 \
            + v[SYMBOLS['eps']] * y

    def is_smooth(self) -> bool:
        disc = sympy.discriminant(self.quintic(), sympy.Symbol('y'))
        return self.field(sympy.Rational(disc)) != 0

    def to_json(self) -> dict:
        out = {name: self.field.to_json(getattr(self, name)) for name in PARAM_NAMES}
        out['field'] = self.field.name
        out['seed'] = self.seed
        return out

# -- data files ------------------------------------------------------------------

_LINE = re.compile(r'^\s*([A-Za-z_]\w*(?:\(\s*\d+\s*,\s*\d+\s*\))?)\s*=\s*(.+?)\s*$')

@lru_cache(maxsize=None)
def read_named_lines(path: str) -> tuple[tuple[str, str, int], ...]:
    """`name = value` lines of a data file, with their line numbers."""
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip() or line.lstrip().startswith('#'):
            continue
        match = _LINE.match(line)
        if not match:
            raise DataFormatError(f"{path}:{lineno}: expected `name = expression`")
        out.append((match.group(1).replace(' ', ''), match.group(2), lineno))
    return tuple(out)

def _parse(text: str, path: str, lineno: int, extra: Optional[dict] = None) -> sympy.Expr:
    local = dict(SYMBOLS)
    if extra:
        local.update(extra)
    try:
        return parse_expr(text, local_dict=local)
    except (SyntaxError, TypeError, sympy.SympifyError) as e:
        raise DataFormatError(f"{path}:{lineno}: cannot parse {text!r} ({e})")

@lru_cache(maxsize=None)
def read_expressions(path: str) -> tuple[tuple[str, sympy.Expr], ...]:
    return tuple((name, _parse(text, path, lineno)) for name, text, lineno in read_named_lines(path))

def instantiate(expr: sympy.Expr, ring: PolyRing, params: ParamSet, degree: Optional[int] = None) -> Poly:
    symbols = [SYMBOLS[name] for name in ring.names]
    return poly_from_expr(expr.subs(params.sympy_values()), ring, symbols, degree)

# -- presented rings -----------------------------------------------------------------

@dataclass
class PresentedRing:
    """K[generators]/(relations), known degree by degree."""
    name: str
    ring: PolyRing
    relations: dict[str, Poly]
    params: Optional[ParamSet] = None
    quotient: GradedQuotient = field(init=False, repr=False)
    # a weight-1 generator that is a nonzerodivisor, used to build the pieces
    regular_var: ClassVar[Optional[str]] = None

    def __post_init__(self):
        regular = self.ring.index(self.regular_var) if self.regular_var else None
        self.quotient = GradedQuotient(self.ring, list(self.relations.values()), self.name, regular)

    @property
    def field_spec(self) -> FieldSpec:
        return self.ring.field

    def var(self, name: str) -> Poly:
        return self.ring.var(self.ring.index(name))

    def dim(self, d: int) -> int:
        return self.quotient.dim(d)

    def normal_form(self, g: Poly, degree: Optional[int] = None) -> np.ndarray:
        d = g.degree if degree is None else degree
        if g.is_zero():
            return zeros(self.field_spec, 1, self.dim(d))[0]
        return self.quotient.normal_form(g, d)

    def is_zero(self, g: Poly, degree: Optional[int] = None) -> bool:
        return not np.any(self.normal_form(g, degree) != 0)

    def expected_dim(self, n: int) -> int:
        raise NotImplementedError

    def hilbert_check(self, window: Sequence[int]) -> CheckResult:
        try:
            got = {n: self.dim(n) for n in window}
        except ToolkitError as e:
            return check(f'hilbert_{self.name}', False, RESOLVED, str(e), relations=len(self.relations))
        expected = {n: self.expected_dim(n) for n in window}
        bad = [n for n in window if got[n] != expected[n]]
        return check(f'hilbert_{self.name}', not bad, RESOLVED,
                     f"dim in degree {bad[0]} is {got[bad[0]]}, expected {expected[bad[0]]}" if bad else None,
                     dims=got, relations=len(self.relations))

    def to_json(self) -> dict:
        return {'name': self.name, 'generators': dict(zip(self.ring.names, self.ring.weights)),
                'relations': {k: format_poly(g) for k, g in self.relations.items()}}

class CurveRing(PresentedRing):
    """Even-degree-free part of the canonical ring of the genus 2 curve, on r_i, s_i, z, t_i."""
    def expected_dim(self, n: int) -> int:
        return {0: 1, 1: 0}.get(n, 2 * n - 1)

class ThetaRing(PresentedRing):
    regular_var = 'theta'

    def expected_dim(self, n: int) -> int:
        return 1 if n == 0 else n * n

@dataclass
class Projection:
    """x0 -> theta, x1 -> xi, x2 -> k0 rho0 + k1 rho1, x3 -> a degree 3 element."""
    k0: int = 1
    k1: int = 0
    x3: str = 'sigma0'

    def to_json(self) -> dict:
        return {'k0': self.k0, 'k1': self.k1, 'x3': self.x3}

@dataclass
class CanonicalRing(PresentedRing):
    projection: Projection = field(default_factory=Projection)
    regular_var = 'theta'

    def expected_dim(self, n: int) -> int:
        inv = EXAMPLE_INVARIANTS
        return {0: 1, 1: inv.pg}.get(n, inv.chi + n * (n - 1) // 2 * inv.K2)

    def element(self, text: str, degree: Optional[int] = None) -> Poly:
        return instantiate(_parse(text, '<element>', 0), self.ring, self.params, degree)

    def images(self) -> list[Poly]:
        F = self.field_spec
        pr = self.projection
        x2 = self.var('rho0').scale(pr.k0) + self.var('rho1').scale(pr.k1)
        if x2.is_zero():
            raise ConfigError('x2 must map to a nonzero combination of rho0 and rho1')
        return [self.var('theta'), self.var('xi'), x2, self.element(pr.x3, 3)]

    def p_module(self):
        return self.quotient.p_module(self.images())

def build_curve_ring(params: ParamSet) -> CurveRing:
    """The 37 relations among r_i = y0^(2-i) y1^i, s_i = y0^(3-i) y1^i, z, t_i = y0^(1-i) y1^i z."""
    ring = PolyRing(Weights(CURVE_WEIGHTS), params.field, CURVE_NAMES)
    v = {name: ring.var(k) for k, name in enumerate(CURVE_NAMES)}
    r = [v['r0'], v['r1'], v['r2']]
    s = [v['s0'], v['s1'], v['s2'], v['s3']]
    t = [v['t0'], v['t1']]
    z = v['z']
    p = params
    G = r[2] * r[2] + (r[1] * r[2]).scale(p.lam) + (r[0] * r[2]).scale(p.mu) \
        + (r[0] * r[1]).scale(p.nu) + (r[0] * r[0]).scale(p.eps)

    def rmono(count: int, e: int) -> Poly:
        """r0^(count - ceil(e/2)) r1^(e % 2) r2^(e // 2), the product of `count` r's of y1-degree e."""
        return r[0] ** (count - (e + 1) // 2) * r[1] ** (e % 2) * r[2] ** (e // 2)

    rels = {'r11': r[1] * r[1] - r[0] * r[2]}
    for i in range(2):
        for j in range(1, 4):
            rels[f'rs{i}{j}'] = r[i] * s[j] - r[i + 1] * s[j - 1]
        rels[f'rt{i}'] = r[i] * t[1] - r[i + 1] * t[0]
    for i in range(4):
        for j in range(i, 4):
            rels[f'ss{i}{j}'] = s[i] * s[j] - rmono(3, i + j)
    for i in range(3):
        rels[f'sz{i}'] = s[i] * z - r[i] * t[0]
    rels['sz3'] = s[3] * z - r[2] * t[1]
    rels['zz'] = z * z - r[1] * G
    for i in range(4):
        for j in range(2):
            rels[f'st{i}{j}'] = s[i] * t[j] - rmono(2, i + j) * z
    for i in range(2):
        rels[f'zt{i}'] = z * t[i] - s[i + 1] * G
    for i in range(2):
        for j in range(i, 2):
            rels[f'tt{i}{j}'] = t[i] * t[j] - r[1] * r[i + j] * G
    return CurveRing('curve', ring, rels, params)

def theta_relation_exprs() -> tuple[tuple[str, sympy.Expr], ...]:
    return read_expressions(str(DATA_DIR / 'theta_relations.txt'))

def build_theta_ring(params: ParamSet) -> ThetaRing:
    ring = PolyRing(Weights(THETA_WEIGHTS), params.field, THETA_NAMES)
    rels = {name: instantiate(expr, ring, params) for name, expr in theta_relation_exprs()}
    for name, g in rels.items():
        if not g.is_homogeneous() or g.is_zero():
            raise DataFormatError(f"theta relation {name} is not a nonzero form")
    return ThetaRing('theta', ring, rels, params)

@lru_cache(maxsize=None)
def canonical_relation_exprs() -> tuple[tuple[str, sympy.Expr], ...]:
    """rho2 = (xi^2 - a rho0 - b rho1 - c theta^2) / s2 substituted into the theta relations."""
    S = SYMBOLS
    rho2 = (S['xi'] ** 2 - S['a'] * S['rho0'] - S['b'] * S['rho1'] - S['c'] * S['theta'] ** 2) / S['s2']
    return tuple((name, sympy.expand(expr.subs(S['rho2'], rho2))) for name, expr in theta_relation_exprs())

def build_canonical_ring(params: ParamSet, projection: Optional[Projection] = None) -> CanonicalRing:
    if params.s2 == 0:
        raise ConfigError('s2 = 0: the branch section lies in <theta^2, rho0, rho1>')
    ring = PolyRing(Weights(CANONICAL_WEIGHTS), params.field, CANONICAL_NAMES)
    rels = {name: instantiate(expr, ring, params) for name, expr in canonical_relation_exprs()}
    return CanonicalRing('canonical', ring, rels, params, projection or Projection())

# -- points of the symmetric square ------------------------------------------------------

class ThetaModel:
    """Values of the theta-ring generators at the image of a pair of curve points (theta = 1),
    and of xi = sqrt(s) on the double cover."""

    def __init__(self, params: ParamSet, seed: int = 0):
        if not params.field.is_prime:
            raise ToolkitError('the point model needs a prime field')
        self.params = params
        self.p = params.field.prime
        self.rng = make_rng(seed)

    def _poly(self, coeffs: Sequence[int], y: int) -> int:
        """coeffs[0] y^k + ... + coeffs[k], reduced mod p."""
        acc = 0
        for c in coeffs:
            acc = (acc * y + c) % self.p
        return acc

    def quintic(self, y: int) -> int:
        q = self.params
        return self._poly((1, q.lam, q.mu, q.nu, q.eps, 0), y)

    def curve_point(self) -> tuple[int, int]:
        """(y, z) with z^2 = y^5 + lam y^4 + mu y^3 + nu y^2 + eps y and z != 0."""
        p = self.p
        while True:
            y = self.rng.randrange(1, p)
            v = self.quintic(y)
            if v == 0:
                continue
            root = sqrt_mod(v, p)
            if root is None:
                continue
            return y, root if self.rng.random() < 0.5 else (-root) % p

    def theta_values(self) -> dict[str, int]:
        p, q = self.p, self.params
        y, z = self.curve_point()
        while True:
            y2, z2 = self.curve_point()
            if y2 != y:
                break
        lam, mu, nu, eps = q.lam, q.mu, q.nu, q.eps
        d = pow((y - y2) % p, -1, p)
        h = lambda x: self._poly((3, 4 * lam, 3 * mu, 2 * nu, eps), x)
        k = lambda x: self._poly((mu, 2 * nu, 3 * eps, 0), x)
        m = lambda x: self._poly((1, 2 * lam, 3 * mu, 4 * nu, 3 * eps, 0), x)
        n = lambda x: self._poly((3, 2 * lam, mu, 0, 0), x)
        s, pr = (y + y2) % p, y * y2 % p
        out = {'theta': 1, 'rho0': s, 'rho1': pr}
        out['rho2'] = (pr * pr * s + 2 * lam * pr * pr + mu * pr * s + 2 * nu * pr + eps * s - 2 * z * z2) * d * d % p
        out['sigma0'] = (z - z2) * d % p
        out['sigma1'] = (z * y2 - y * z2) * d % p
        out['sigma2'] = (z * y2 * y2 - y * y * z2) * d % p
        out['sigma3'] = (y * y * z * y2 ** 3 - y ** 3 * y2 * y2 * z2 + y * z * h(y2) - h(y) * y2 * z2
                         + z * k(y2) - k(y) * z2) * pow(d, 3, p) % p
        out['zeta'] = (z * z2 * s - 2 * pr ** 3 - lam * pr * pr * s - mu * (y ** 3 * y2 + y * y2 ** 3)
                       - nu * (y * y * y2 + y * y2 * y2) - 2 * eps * pr) * d * d % p
        out['tau0'] = (y ** 3 * z2 - z * y2 ** 3) * d % p
        out['tau1'] = (eps * (y * y * z2 - z * y2 * y2) + m(y) * y2 * z2 - y * z * m(y2)
                       + n(y) * y2 * y2 * z2 - y * y * z * n(y2)) * pow(d, 3, p) % p
        return out

    def point(self) -> dict[str, int]:
        """Generator values of the canonical ring at a point of the surface."""
        p, q = self.p, self.params
        while True:
            v = self.theta_values()
            s = (q.s2 * v['rho2'] + q.a * v['rho0'] + q.b * v['rho1'] + q.c) % p
            root = sqrt_mod(s, p) if s else 0
            if root is not None:
                v['xi'] = root
                return v

    def points(self, count: int) -> list[dict[str, int]]:
        return [self.point() for _ in range(count)]

def at(values: dict[str, int], ring: PolyRing) -> list[int]:
    return [values[name] for name in ring.names]

def curve_point_values(model: ThetaModel) -> dict[str, int]:
    """Curve-ring generators at (y0, y1) = (1, y)."""
    y, z = model.curve_point()
    p = model.p
    out = {f'r{i}': pow(y, i, p) for i in range(3)}
    out.update({f's{i}': pow(y, i, p) for i in range(4)})
    out.update({'z': z, 't0': z, 't1': y * z % p})
    return out

def relations_at_points(R: PresentedRing, points: Sequence[dict[str, int]]) -> CheckResult:
    """Every relation vanishes at every sample point."""
    bad = [(name, k) for k, pt in enumerate(points) for name, g in R.relations.items()
           if g.evaluate(at(pt, R.ring)) != 0]
    return check(f'relations_at_points_{R.name}', not bad, EVIDENCE,
                 f"{bad[0][0]} does not vanish at point {bad[0][1]}" if bad else None,
                 points=len(points), relations=len(R.relations))

# -- the cocycles ----------------------------------------------------------------------------

PAIRS = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]

@dataclass
class CocycleData:
    """Components phi_ij (i < j) of two elements of H^1(Omega^1(-1)) over the canonical ring."""
    eta: dict[tuple[int, int], Poly]
    etap: dict[tuple[int, int], Poly]

    def cocycles(self) -> dict[str, dict[tuple[int, int], Poly]]:
        return {'eta': self.eta, "eta'": self.etap}

def eta_data(R: CanonicalRing) -> CocycleData:
    w = EXAMPLE_WEIGHTS
    comps = dict(read_expressions(str(DATA_DIR / 'eta.txt')))
    out = {}
    for prefix in ('eta', 'etap'):
        out[prefix] = {}
        for i, j in PAIRS:
            key = f'{prefix}{i}{j}'
            if key not in comps:
                raise DataFormatError(f"eta.txt: missing {key}")
            out[prefix][(i, j)] = instantiate(comps[key], R.ring, R.params, w[i] + w[j] + 1)
    return CocycleData(out['eta'], out['etap'])

def cocycle_check(d: CocycleData, R: CanonicalRing) -> CheckResult:
    """rho(x_i) phi_jk - rho(x_j) phi_ik + rho(x_k) phi_ij = 0 in R for i < j < k."""
    x = R.images()
    w = EXAMPLE_WEIGHTS
    bad = []
    for name, phi in d.cocycles().items():
        for i, j, k in subsets(4, 3):
            residue = x[i] * phi[(j, k)] - x[j] * phi[(i, k)] + x[k] * phi[(i, j)]
            if not R.is_zero(residue, w[i] + w[j] + w[k] + 1):
                bad.append(f'{name}({i},{j},{k})')
    return check('cocycle', not bad, RESOLVED, f"nonzero residue for {bad[0]}" if bad else None,
                 triples=8, failures=bad)

# -- module structure over P(1,1,2,3) ----------------------------------------------------------

def module_generators(R: CanonicalRing) -> dict[str, Poly]:
    """Nine generators of R as a module over K[x0..x3]."""
    v = R.var
    return {'1': R.ring.const(1), 'rho1': v('rho1'), 'sigma1': v('sigma1'), 'sigma2': v('sigma2'),
            'sigma3': v('sigma3'), 'zeta': v('zeta'), 'tau0': v('tau0'), 'tau1': v('tau1'),
            'rho1*zeta': v('rho1') * v('zeta')}

def gamma_generators(R: CanonicalRing, d: CocycleData) -> dict[str, Poly]:
    """1, rho1, sigma1, zeta and the components of both cocycles."""
    gens = {'1': R.ring.const(1), 'rho1': R.var('rho1'), 'sigma1': R.var('sigma1'), 'zeta': R.var('zeta')}
    for name, phi in d.cocycles().items():
        for (i, j), g in phi.items():
            gens[f'{name}{i}{j}'] = g
    return gens

def module_span_dims(R: CanonicalRing, gens: dict[str, Poly], window: int) -> dict[int, int]:
    """dim of the K[x0..x3]-submodule generated by `gens`, degree by degree: S_d = sum x_i S_{d-w_i} + <gens_d>."""
    F = R.field_spec
    module = R.p_module()
    w = module.weights
    bases: dict[int, np.ndarray] = {}
    dims = {}
    for d in range(window + 1):
        size = R.dim(d)
        blocks = []
        for i, wi in enumerate(w):
            e = d - wi
            if e < 0 or bases[e].shape[0] == 0:
                continue
            blocks.append(matmul(F, bases[e], module.matrix(i, e).T))
        for g in gens.values():
            if g.degree == d:
                blocks.append(R.normal_form(g)[None, :])
        A = np.vstack(blocks) if blocks else zeros(F, 0, size)
        B, pivots = rref(F, A.reshape(-1, size))
        bases[d] = B
        dims[d] = len(pivots)
    return dims

def generation_check(R: CanonicalRing, gens: dict[str, Poly], window: int, name: str = 'generation') -> CheckResult:
    dims = module_span_dims(R, gens, window)
    bad = [d for d in range(window + 1) if dims[d] != R.dim(d)]
    return check(name, not bad, RESOLVED,
                 f"degree {bad[0]}: span {dims[bad[0]]} < dim R = {R.dim(bad[0])}" if bad else None,
                 window=window, generators=sorted(gens), spans=dims)

def module_presentation(R: CanonicalRing, bound: int = 16) -> Presentation:
    """R as a K[x0..x3]-module on the nine generators.

    x0 maps to theta, a nonzerodivisor of R, so the relations are found
    modulo x0 and the presentation carries x0 as its regular variable.
    """
    gens = [(g.degree, R.normal_form(g)) for g in module_generators(R).values()]
    return minimal_presentation(gens, R.p_module(), bound, regular=0)

def presentation_hilbert_check(R: CanonicalRing, P: Presentation, top: int) -> CheckResult:
    """The presented module has the Hilbert function of R up to `top`, past the search bound."""
    M = P.cokernel()
    try:
        bad = [d for d in range(top + 1) if M.dim(d) != R.expected_dim(d)]
    except ToolkitError as e:
        return check('presentation_hilbert', False, RESOLVED, str(e), top=top, bound=P.bound)
    return check('presentation_hilbert', not bad, RESOLVED,
                 f"coker has dim {M.dim(bad[0])} in degree {bad[0]}, expected {R.expected_dim(bad[0])}"
                 if bad else None, top=top, bound=P.bound, relations=P.relations.source.rank)

def regular_sequence_check(R: CanonicalRing, window: int) -> CheckResult:
    """theta is a nonzerodivisor on R and xi on R/theta R, checked degreewise."""
    F = R.field_spec
    ti, xi = R.ring.index('theta'), R.ring.index('xi')
    bad = []
    for d in range(window + 1):
        Mt = R.quotient.mult_var(ti, d)
        if rank(F, Mt) != R.dim(d):
            bad.append(f'theta in degree {d}')
            continue
        Mx = R.quotient.mult_var(xi, d)
        both = np.hstack([Mx, Mt])
        kernel = 2 * R.dim(d) - rank(F, both) if both.size else 0
        # only the Koszul pairs (theta e, -xi e), e in R_{d-1}
        if kernel != R.dim(d - 1):
            bad.append(f'xi mod theta in degree {d}')
    return check('regular_sequence', not bad, RESOLVED, bad[0] if bad else None, window=window)

def _span_contains(R: PresentedRing, polys: Sequence[Poly], g: Poly, d: int) -> bool:
    F = R.field_spec
    vecs = [R.normal_form(h, d) for h in polys]
    A = np.array(vecs).reshape(len(vecs), R.dim(d)) if vecs else zeros(F, 0, R.dim(d))
    return rank(F, A) == rank(F, np.vstack([A, R.normal_form(g, d)[None, :]]))

def _products(R: PresentedRing, factors: Sequence[Poly], d: int) -> list[Poly]:
    """All monomials of degree d in the given homogeneous elements."""
    w = Weights(tuple(f.degree for f in factors))
    out = []
    for mono in monomials_of_degree(w, d):
        g = R.ring.const(1)
        for f, e in zip(factors, mono):
            if e:
                g = g * f ** e
        out.append(g)
    return out

def projection_check(R: CanonicalRing) -> CheckResult:
    """x3 must not land in K[theta, xi, rho(x2)]_3, nor in K[theta, xi, rho0, rho1, zeta]_3
    (otherwise the map factors through the involution)."""
    theta, xi, x2, x3 = R.images()
    v = R.var
    plane = _products(R, [theta, xi, x2], 3)
    invariant = _products(R, [theta, xi, v('rho0'), v('rho1')], 3) + [v('zeta')]
    in_plane = _span_contains(R, plane, x3, 3)
    in_invariant = _span_contains(R, invariant, x3, 3)
    return check('projection', not in_plane and not in_invariant, RESOLVED,
                 'x3 lies in K[theta, xi, rho(x2)]' if in_plane else 'x3 is invariant under the involution',
                 projection=R.projection.to_json())

def branch_pair(R: CanonicalRing) -> list[Poly]:
    p, v = R.params, R.var
    return [v('sigma0').scale(p.a) + v('sigma1').scale(p.b) + v('sigma2'),
            v('sigma1').scale(p.a) + v('sigma2').scale(p.b) + v('sigma3')]

def _r1r2(R: CanonicalRing) -> list[Poly]:
    return [R.ring.monomial(m1) * R.ring.monomial(m2)
            for m1 in monomials_of_degree(R.ring.weights, 1) for m2 in monomials_of_degree(R.ring.weights, 2)]

def h0_FN_quotient(R: CanonicalRing) -> tuple[int, int]:
    """h^0(F(2) (x) N_(-1)) and h^0(F(2) (x) N_(-2)) by span arithmetic in R_3 and R_4."""
    F = R.field_spec
    V = [R.normal_form(g, 3) for g in _r1r2(R) + branch_pair(R)]
    n1 = 1 + R.dim(3) - rank(F, np.array(V))
    p, pr = R.params, R.projection
    tau0, tau1 = R.var('tau0'), R.var('tau1')
    k0, k1 = F(pr.k0), F(pr.k1)
    U = [-(tau0.scale(k0) + tau1.scale(k1)),
         tau0.scale(F.sub(F.mul(k0, p.b), F.mul(k1, p.a))) + tau1.scale(k0)]
    n2 = rank(F, np.array([R.normal_form(t, 4) for t in (tau0, tau1)])) \
        - rank(F, np.array([R.normal_form(u, 4) for u in U]))
    return n1, n2

def quadratic_test(R: CanonicalRing) -> int:
    """k0^2 - b k0 k1 + a k1^2."""
    F, p, pr = R.field_spec, R.params, R.projection
    k0, k1 = F(pr.k0), F(pr.k1)
    return F.add(F.sub(F.mul(k0, k0), F.mul(p.b, F.mul(k0, k1))), F.mul(p.a, F.mul(k1, k1)))

def cj_decision(R: CanonicalRing) -> tuple[CoeffVector, CheckResult]:
    """c_{-1}, c_{-2}, c_{-3} of E from the position of rho(x3) and the choice of rho(x2)."""
    x3 = R.images()[3]
    special = _span_contains(R, _r1r2(R) + branch_pair(R), x3, 3)
    n1, n2 = h0_FN_quotient(R)
    # h^0(F(2) (x) N_(-3)) vanishes for this surface
    y = {-1: n1, -2: n2, -3: 0}
    coeffs = compute_coeffs(EXAMPLE_WEIGHTS, y, {-1: 1 if special else 0})
    degenerate = quadratic_test(R) == 0
    consistent = (n2 == 1) == degenerate and n1 == 4
    result = check('cj_decision', consistent, RESOLVED,
                   f"h0 values ({n1}, {n2}) disagree with the case split" if not consistent else None,
                   special_x3=special, degenerate_x2=degenerate, h0_FN=[n1, n2],
                   y_provenance={'-1': RESOLVED, '-2': RESOLVED, '-3': PAPER_SUPPLIED},
                   coefficients=coeffs.to_json())
    return coeffs, result

def singular_branch_check(params: ParamSet) -> CheckResult:
    """The normal form needs a nonzero rho2 coefficient in s; a = b = c = 0 is a special choice."""
    special = params.a == 0 and params.b == 0 and params.c == 0
    if special:
        info('warning: a = b = c = 0 is a special, non-generic branch section')
    return check('branch_section', params.s2 != 0, RESOLVED,
                 '0 in B is singular: s lies in <theta^2, rho0, rho1>', special=special)

# -- the matrix ----------------------------------------------------------------------------------

_SUMMAND = re.compile(r'^\s*(?:O\((-?\d+)\)|Omega(\d+)\((-?\d+)\))\s*$')
_ENTRY = re.compile(r'^a\((\d+),(\d+)\)$')
_BLOCK = re.compile(r'^\s*(\d+)-(\d+)\s*x\s*(\d+)-(\d+)\s*$')

@dataclass
class ExampleMatrix:
    matrix: GradedMatrix
    summands: list[SheafKind]
    helpers: dict[str, Poly]
    params: ParamSet

    @property
    def ring(self) -> PolyRing:
        return self.matrix.ring

    def bundle_map(self) -> BundleMap:
        return BundleMap.symmetric(self.matrix, self.summands, 'alpha~')

    def bundle(self) -> Bundle:
        """E, the summands after the leading O."""
        E = Bundle(name='E')
        for s in self.summands[1:]:
            E.add(s, 1)
        return E

    def with_entry(self, i: int, j: int, g: Poly) -> 'ExampleMatrix':
        entries = [list(row) for row in self.matrix.entries]
        entries[i][j] = g
        M = GradedMatrix(self.ring, self.matrix.source, self.matrix.target, entries)
        return ExampleMatrix(M, self.summands, self.helpers, self.params)

def _parse_summand(text: str, w: Weights, where: str) -> SheafKind:
    match = _SUMMAND.match(text)
    if not match:
        raise DataFormatError(f"{where}: bad summand {text!r}")
    if match.group(1) is not None:
        return SheafKind.line(int(match.group(1)))
    return SheafKind.omega(w, int(match.group(2)), int(match.group(3)))

def build_alpha_tilde(params: ParamSet, path: Optional[Path] = None) -> ExampleMatrix:
    """The printed blocks of the matrix, completed by symmetry."""
    path = str(path or DATA_DIR / 'alpha_tilde.txt')
    w = EXAMPLE_WEIGHTS
    ring = PolyRing(w, params.field)
    shift = 1 + w.total
    summands, row_twists, blocks = [], None, []
    helpers_expr: dict[str, sympy.Expr] = {}
    listed: dict[tuple[int, int], tuple[str, int]] = {}
    for name, text, lineno in read_named_lines(path):
        where = f'{path}:{lineno}'
        entry = _ENTRY.match(name)
        if name == 'summands':
            summands = [_parse_summand(t, w, where) for t in text.split(',')]
        elif name == 'rows':
            row_twists = tuple(int(t) for t in text.split(','))
        elif name == 'block':
            match = _BLOCK.match(text)
            if not match:
                raise DataFormatError(f"{where}: bad block {text!r}")
            r0, r1, c0, c1 = (int(g) - 1 for g in match.groups())
            blocks.append((range(r0, r1 + 1), range(c0, c1 + 1)))
        elif entry:
            listed[(int(entry.group(1)) - 1, int(entry.group(2)) - 1)] = (text, lineno)
        else:
            helpers_expr[name] = _parse(text, path, lineno)
    if row_twists is None or not summands:
        raise DataFormatError(f"{path}: needs `summands` and `rows`")
    size = len(row_twists)
    target = GradedFree(w, row_twists)
    source = target.dual(shift)

    def printed(i: int, j: int) -> bool:
        return any(i in rows and j in cols for rows, cols in blocks)

    entries = [[ring.zero() for _ in range(size)] for _ in range(size)]
    for (i, j), (text, lineno) in listed.items():
        if not (0 <= i < size and 0 <= j < size) or not printed(i, j):
            raise DataFormatError(f"{path}:{lineno}: entry ({i + 1},{j + 1}) outside the printed blocks")
        expr = _parse(text, path, lineno, helpers_expr)
        try:
            entries[i][j] = instantiate(expr, ring, params, source.twists[j] - target.twists[i])
        except DegreeMismatchError as e:
            raise DataFormatError(f"{path}:{lineno}: {e}")
    for i in range(size):
        for j in range(size):
            if not printed(i, j):
                entries[i][j] = entries[j][i]
    helpers = {name: instantiate(expr, ring, params) for name, expr in helpers_expr.items()}
    return ExampleMatrix(GradedMatrix(ring, source, target, entries), summands, helpers, params)

def omega_block_check(m: ExampleMatrix, contraction: int = 1) -> CheckResult:
    """Between the two Omega^1(-1) copies and the two Omega^2 copies the matrix is
    zero on the diagonal copies and, off the diagonal, the contraction against e_contraction:
    entry (k, l) = c * sign(contraction, k, l, m) * x_m with {contraction, k, l, m} = {0, 1, 2, 3}."""
    bm = m.bundle_map()
    groups = [g for g in bm.row_groups if not g.sheaf.is_line]
    if len(groups) != 2:
        return check('omega_block', False, RESOLVED, f"expected two Omega groups, found {len(groups)}")
    ring = m.ring
    F = ring.field
    x = ring.gens()
    first, second = groups
    for g in groups:
        for r in g.indices:
            for c in g.indices:
                if not bm.entry(r, c).is_zero():
                    return check('omega_block', False, RESOLVED, f"diagonal copy block has entry ({r + 1},{c + 1})")
    scale, bad = None, None
    for k in range(4):
        for l in range(4):
            got = bm.entry(first.start + k, second.start + l)
            rest = [t for t in range(4) if t not in (contraction, k, l)]
            if contraction in (k, l) or k == l:
                expected = ring.zero()
            else:
                perm = [contraction, k, l, rest[0]]
                inversions = sum(1 for s in range(4) for t in range(s + 1, 4) if perm[s] > perm[t])
                expected = x[rest[0]].scale(-1 if inversions % 2 else 1)
            if expected.is_zero():
                if not got.is_zero():
                    bad = (k, l)
                continue
            if got.is_zero():
                bad = (k, l)
                continue
            mono = next(iter(expected.terms))
            if set(got.terms) != {mono}:
                bad = (k, l)
                continue
            ratio = F.mul(got.terms[mono], F.inv(expected.terms[mono]))
            if scale is None:
                scale = ratio
            elif ratio != scale:
                bad = (k, l)
    ok = bad is None and scale is not None
    return check('omega_block', ok, RESOLVED,
                 f"entry ({bad[0]},{bad[1]}) of the off-diagonal block" if bad else 'off-diagonal block is zero',
                 contraction=contraction, scale=F.to_json(scale) if scale is not None else None)

# -- the pipeline ------------------------------------------------------------------------------

@dataclass
class ExampleOptions:
    field_spec: FieldSpec = field(default_factory=FieldSpec)
    seed: int = 0
    hilbert_window: int = 8
    generation_window: int = 10
    regular_window: int = 8
    euler_window: int = 12
    chart: int = 1
    k_max: int = 4
    sample: float = 1.0
    workers: int = 1
    annihilation: str = 'presentation'
    points: int = 16
    presentation_bound: int = 16
    rank_condition: bool = True
    negative_control: bool = True

    def to_json(self) -> dict:
        return {'field': self.field_spec.name, 'seed': self.seed, 'hilbert_window': self.hilbert_window,
                'generation_window': self.generation_window, 'regular_window': self.regular_window,
                'euler_window': self.euler_window, 'chart': self.chart, 'k_max': self.k_max,
                'sample': self.sample, 'annihilation': self.annihilation, 'points': self.points,
                'presentation_bound': self.presentation_bound, 'rank_condition': self.rank_condition,
                'negative_control': self.negative_control}

def negative_control(example: ExampleMatrix, chart: int, seed: int, k_max: int) -> CheckResult:
    """A random symmetric matrix with the twists of the chart frame should fail the rank condition."""
    cm = chart_reduce(example.bundle_map(), chart)
    rows = [example.matrix.target.twists[r] for r in cm.row_labels]
    control = random_symmetric_chart(example.ring, rows, 1 + EXAMPLE_WEIGHTS.total, chart, make_rng(seed + 1))
    rc = rank_condition(control, k_max=k_max, sample=0.1, seed=seed)
    return check('negative_control', not rc.result.passed, EVIDENCE,
                 'a random symmetric matrix passed the rank condition', witness_minor=rc.result.witness)

def verify_example(params: ParamSet, options: Optional[ExampleOptions] = None,
                   timer: Optional[Timer] = None) -> dict:
    """Every check on the example, each reported independently."""
    opts = options or ExampleOptions(params.field)
    timer = timer or Timer()
    checks: list[CheckResult] = []
    w = EXAMPLE_WEIGHTS
    info("\nStarting example verification with:")
    info(f"Field:            {params.field.name}")
    info(f"Seed:             {opts.seed}")
    info(f"Chart:            x{opts.chart}")
    info(f"Minor sample:     {opts.sample}")

    checks.append(singular_branch_check(params))
    if params.s2 == 0:
        return _example_report(params, opts, checks, {})
    window = range(0, opts.hilbert_window + 1)
    banner('Rings')
    with timer.stage('rings'):
        curve = build_curve_ring(params)
        theta = build_theta_ring(params)
        R = build_canonical_ring(params)
        checks += [curve.hilbert_check(window), theta.hilbert_check(window), R.hilbert_check(window)]
        checks.append(regular_sequence_check(R, opts.regular_window))
        checks.append(projection_check(R))
    model = ThetaModel(params, opts.seed) if params.field.is_prime else None
    if model is not None:
        with timer.stage('points'):
            pts = model.points(opts.points)
            checks.append(relations_at_points(theta, pts))
            checks.append(relations_at_points(R, pts))
            checks.append(relations_at_points(curve, [curve_point_values(model) for _ in range(opts.points)]))

    banner('Cocycles and generators')
    with timer.stage('cocycles'):
        eta = eta_data(R)
        checks.append(cocycle_check(eta, R))
        checks.append(generation_check(R, gamma_generators(R, eta), opts.generation_window, 'generation_gamma'))
        checks.append(generation_check(R, module_generators(R), opts.generation_window, 'generation_module'))

    banner('Coefficients')
    coeffs, cj = cj_decision(R)
    checks.append(cj)
    E = E_of_phi(w, EXAMPLE_INVARIANTS, coeffs)
    example = build_alpha_tilde(params)
    same = E.summands == example.bundle().summands
    checks.append(check('E_matches_matrix', same, RESOLVED, f"E = {E}, matrix carries {example.bundle()}",
                        E=str(E), det_degree=det_degree_of(w, E)))

    banner('Matrix')
    with timer.stage('matrix'):
        bm = example.bundle_map()
        sym = check_symmetric(bm, -1 - w.total)
        checks.append(check('symmetry', sym, RESOLVED, 'matrix is not symmetric'))
        omega_groups = [g for g in bm.row_groups if not g.sheaf.is_line]
        kernels = [check_row_kernel(bm, g) for g in omega_groups]
        checks.append(check('row_kernel', all(kernels), RESOLVED, 'an Omega group violates the Koszul relation',
                            groups=len(kernels)))
        checks.append(check_minimal(bm))
        checks.append(omega_block_check(example))
        checks.append(euler_exactness(w, E, EXAMPLE_INVARIANTS, range(0, opts.euler_window + 1)))

    extra = {}
    if sym and all(kernels):
        banner('Determinant')
        with timer.stage('determinant'):
            cm = chart_reduce(bm, opts.chart)
            if opts.rank_condition:
                rc = rank_condition(cm, k_max=opts.k_max, sample=opts.sample, seed=opts.seed, workers=opts.workers)
                checks += [rc.result, depth_check(rc.det, rc.full)]
                # rc.det carries the frame degree; strip the extra power of the chart variable
                f = rehomogenize(dehomogenize(rc.det, opts.chart))
            else:
                f = rehomogenize(chart_det(cm, opts.seed))
            everything = list(range(cm.size))
            expected = det_degree_of(w, E)
            checks.append(check('det_degree', f.degree == expected and not f.is_zero(), RESOLVED,
                                f"det has degree {f.degree}, expected {expected}", degree=f.degree,
                                terms=len(f.terms), frame_degree=cm.homogeneous_degree(everything, everything)))
            other = 0 if opts.chart != 0 else 1
            g = rehomogenize(chart_det(chart_reduce(bm, other), opts.seed))
            checks.append(check('charts_agree', proportional(f, g), RESOLVED,
                                f"det on D(x{other}) is not proportional", charts=[opts.chart, other]))
        banner('Annihilation')
        with timer.stage('annihilation'):
            if opts.annihilation == 'points' and model is not None:
                images = [R.images()[k] for k in range(4)]
                pts = [[img.evaluate(at(pt, R.ring)) for img in images] for pt in model.points(opts.points)]
                checks.append(annihilation_at_points(f, pts))
            else:
                P = module_presentation(R, opts.presentation_bound)
                checks.append(annihilation_check(f, P))
                checks.append(presentation_hilbert_check(R, P, f.degree + max(P.generators.twists)))
        if opts.negative_control and opts.rank_condition and params.field.is_prime:
            with timer.stage('negative_control'):
                checks.append(negative_control(example, opts.chart, opts.seed, opts.k_max))
        extra['det'] = {'degree': f.degree, 'terms': len(f.terms)}
    extra['coefficients'] = coeffs.to_json()
    extra['E'] = E.to_json()
    return _example_report(params, opts, checks, extra)

def _example_report(params: ParamSet, opts: ExampleOptions, checks: list[CheckResult], extra: dict) -> dict:
    report = {'schema': REPORT_SCHEMA, 'params': params.to_json(), 'options': opts.to_json(),
              'checks': [c.to_json() for c in checks],
              'passed': all(c.passed for c in checks)}
    report.update(extra)
    return report


import unittest
from hypothesis import given, settings, strategies as st

GFP = FieldSpec(65521)
PARAMS = ParamSet.random(GFP, seed=7)

class TestParams(unittest.TestCase):
    def test_constraint(self):
        self.assertEqual((1 + PARAMS.lam + PARAMS.mu + PARAMS.nu + PARAMS.eps) % 65521, 0)
        with self.assertRaises(ConfigError):
            PARAMS.with_values(eps=PARAMS.eps + 1)

    def test_rational_parameters(self):
        p = ParamSet.random(FieldSpec(None), seed=2)
        self.assertEqual(1 + p.lam + p.mu + p.nu + p.eps, 0)
        self.assertTrue(p.is_smooth())

    def test_branch_section(self):
        self.assertTrue(singular_branch_check(PARAMS).passed)
        self.assertFalse(singular_branch_check(PARAMS.with_values(s2=0)).passed)
        special = singular_branch_check(PARAMS.with_values(a=0, b=0, c=0))
        self.assertTrue(special.details['special'])

class TestRings(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.curve = build_curve_ring(PARAMS)
        cls.theta = build_theta_ring(PARAMS)
        cls.R = build_canonical_ring(PARAMS)

    def test_curve_hilbert(self):
        self.assertEqual(len(self.curve.relations), 37)
        self.assertEqual([self.curve.dim(n) for n in range(7)], [1, 0, 3, 5, 7, 9, 11])

    def test_theta_hilbert(self):
        self.assertEqual(len(self.theta.relations), 37)
        self.assertEqual([self.theta.dim(n) for n in range(7)], [1, 1, 4, 9, 16, 25, 36])

    def test_canonical_hilbert(self):
        self.assertEqual([self.R.dim(n) for n in range(6)], [1, 2, 5, 13, 25, 41])
        self.assertTrue(self.R.hilbert_check(range(0, 9)).passed)

    def test_canonical_hilbert_rational(self):
        R = build_canonical_ring(ParamSet.random(FieldSpec(None), seed=2))
        self.assertEqual([R.dim(n) for n in range(5)], [1, 2, 5, 13, 25])
        self.assertTrue(R.hilbert_check(range(0, 5)).passed)

    @given(st.integers(min_value=100, max_value=10 ** 6))
    @settings(max_examples=3, deadline=None)
    def test_canonical_hilbert_random_parameters(self, seed):
        R = build_canonical_ring(ParamSet.random(GFP, seed))
        self.assertTrue(R.hilbert_check(range(0, 7)).passed)

    def test_substituted_relations(self):
        p = PARAMS
        rel1 = self.R.element(f'{p.a}*rho0**2 + {p.b}*rho0*rho1 + rho1**2 - xi**2*rho0'
                              f' + theta*(-2*zeta + {p.c}*theta*rho0 - {p.mu}*theta*rho1 + {p.eps}*theta**3)')
        self.assertEqual(self.R.relations['rel1'], rel1)
        rel10 = self.R.element(f'sigma0**2 - rho0**3 + theta**2*(-{p.lam}*rho0**2 + rho0*rho1'
                               f' + ({p.a} - {p.mu})*theta**2*rho0 + {p.b}*theta**2*rho1 - theta**2*xi**2'
                               f' + ({p.c} - {p.nu})*theta**4)')
        self.assertEqual(self.R.relations['rel10'], rel10)

    def test_relations_vanish_at_points(self):
        model = ThetaModel(PARAMS, seed=3)
        pts = model.points(6)
        self.assertTrue(relations_at_points(self.theta, pts).passed)
        self.assertTrue(relations_at_points(self.R, pts).passed)
        curve_pts = [curve_point_values(model) for _ in range(6)]
        self.assertTrue(relations_at_points(self.curve, curve_pts).passed)

    def test_regular_sequence(self):
        self.assertTrue(regular_sequence_check(self.R, 6).passed)

    def test_projection(self):
        self.assertTrue(projection_check(self.R).passed)
        R = build_canonical_ring(PARAMS, Projection(x3='zeta + theta*rho1'))
        self.assertFalse(projection_check(R).passed)
        R = build_canonical_ring(PARAMS, Projection(x3='theta*rho0'))
        self.assertFalse(projection_check(R).passed)

    @given(st.integers(min_value=100, max_value=10 ** 6))
    @settings(max_examples=3, deadline=None)
    def test_theta_hilbert_random_parameters(self, seed):
        theta = build_theta_ring(ParamSet.random(GFP, seed))
        self.assertEqual([theta.dim(n) for n in range(1, 5)], [1, 4, 9, 16])

class TestCocycles(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.R = build_canonical_ring(PARAMS)
        cls.eta = eta_data(cls.R)

    def test_components(self):
        p = PARAMS
        self.assertEqual(self.eta.eta[(0, 1)], self.R.element(f'{p.a}*sigma0 + {p.b}*sigma1 + sigma2'))
        self.assertEqual(self.eta.etap[(0, 2)], self.R.element('xi*sigma1'))
        self.assertEqual({g.degree for g in self.eta.eta.values()}, {3, 4, 5, 6})

    def test_cocycle_relation(self):
        self.assertTrue(cocycle_check(self.eta, self.R).passed)
        eta = dict(self.eta.eta)
        eta[(0, 2)] = eta[(0, 2)] + self.R.element('theta*sigma0')
        broken = cocycle_check(CocycleData(eta, self.eta.etap), self.R)
        self.assertFalse(broken.passed)
        self.assertIn('eta(0,1,2)', broken.details['failures'])

    def test_generation(self):
        gens = gamma_generators(self.R, self.eta)
        self.assertTrue(generation_check(self.R, gens, 6).passed)
        self.assertTrue(generation_check(self.R, module_generators(self.R), 6).passed)
        self.assertTrue(generation_check(self.R, {'1': self.R.ring.const(1)}, 1).passed)
        del gens['eta12'], gens["eta'12"]
        missing = generation_check(self.R, gens, 4)
        self.assertFalse(missing.passed)
        self.assertLess(missing.details['spans'][4], 25)

class TestCoefficients(unittest.TestCase):
    def test_default_projection(self):
        R = build_canonical_ring(PARAMS)
        self.assertEqual(h0_FN_quotient(R), (4, 0))
        coeffs, result = cj_decision(R)
        self.assertTrue(result.passed)
        self.assertEqual(coeffs.c, {-1: 2, -2: 0, -3: 0})
        E = E_of_phi(EXAMPLE_WEIGHTS, EXAMPLE_INVARIANTS, coeffs)
        self.assertEqual(str(E), 'Omega^1(-1)^2 + O(-2) + O(-3)^2')

    def test_special_x3(self):
        p = PARAMS
        R = build_canonical_ring(p, Projection(x3=f'{p.a}*sigma0 + {p.b}*sigma1 + sigma2'))
        coeffs, _ = cj_decision(R)
        self.assertEqual((coeffs.c[-1], coeffs.c[-3]), (3, 1))

    def test_degenerate_x2(self):
        # t^2 - b t + a = 0 at t = 2 when a = 2 b - 4
        p = PARAMS.with_values(b=3, a=2)
        R = build_canonical_ring(p, Projection(k0=2, k1=1))
        self.assertEqual(quadratic_test(R), 0)
        self.assertEqual(h0_FN_quotient(R)[1], 1)
        coeffs, result = cj_decision(R)
        self.assertTrue(result.passed)
        self.assertEqual(coeffs.c[-2], 1)

class TestAlphaTilde(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.example = build_alpha_tilde(PARAMS)
        cls.bm = cls.example.bundle_map()

    def test_entries(self):
        M = self.example.matrix
        x0, x1, x2, x3 = self.example.ring.gens()
        h = self.example.helpers
        self.assertEqual(M.entries[1][0], x0 * x3 * h['p2'])
        self.assertEqual(M.entries[4][11], -x2)
        self.assertEqual(M.entries[1][4], -(x0 * x1 * x2).scale(PARAMS.lam))
        self.assertEqual(M.target.twists, (0, 2, 3, 3, 2, 2, 3, 4, 2, 2, 3, 4))
        self.assertEqual(M.source.twists, (8, 6, 5, 5, 6, 6, 5, 4, 6, 6, 5, 4))

    def test_structure(self):
        self.assertTrue(check_symmetric(self.bm, -8))
        for g in self.bm.row_groups[4:]:
            self.assertTrue(check_row_kernel(self.bm, g))
        self.assertTrue(check_minimal(self.bm).passed)
        self.assertEqual(self.example.bundle().summands,
                         E_of_phi(EXAMPLE_WEIGHTS, EXAMPLE_INVARIANTS, CoeffVector({-1: 2, -2: 0, -3: 0})).summands)

    def test_omega_block(self):
        self.assertTrue(omega_block_check(self.example).passed)
        self.assertFalse(omega_block_check(self.example, contraction=0).passed)
        zero = self.example
        for r in range(4, 8):
            for c in range(8, 12):
                zero = zero.with_entry(r, c, self.example.ring.zero()).with_entry(c, r, self.example.ring.zero())
        self.assertFalse(omega_block_check(zero).passed)

    def test_perturbed_entry(self):
        x0 = self.example.ring.gens()[0]
        broken = self.example.with_entry(1, 3, self.example.matrix.entries[1][3] + x0 ** 3)
        self.assertFalse(check_symmetric(broken.bundle_map(), -8))

    def test_euler_exactness(self):
        self.assertTrue(euler_exactness(EXAMPLE_WEIGHTS, self.example.bundle(), EXAMPLE_INVARIANTS,
                                        range(0, 13)).passed)

    def test_determinant(self):
        cm = chart_reduce(self.bm, 1)
        self.assertEqual(cm.shape, (10, 10))
        everything = list(range(10))
        self.assertEqual(cm.homogeneous_degree(everything, everything), 28)
        f = rehomogenize(chart_det(cm, seed=1))
        self.assertEqual(f.degree, 24)
        g = rehomogenize(chart_det(chart_reduce(self.bm, 0), seed=2))
        self.assertTrue(proportional(f, g))
        R = build_canonical_ring(PARAMS)
        model = ThetaModel(PARAMS, seed=5)
        pts = [[img.evaluate(at(pt, R.ring)) for img in R.images()] for pt in model.points(8)]
        self.assertTrue(annihilation_at_points(f, pts).passed)
        self.assertFalse(annihilation_at_points(f + self.example.ring.gens()[0] ** 24, pts).passed)

    def test_annihilation_exact(self):
        f = rehomogenize(chart_det(chart_reduce(self.bm, 1), seed=1))
        R = build_canonical_ring(PARAMS)
        P = module_presentation(R)
        self.assertEqual(P.regular, 0)
        self.assertTrue(annihilation_check(f, P).passed)
        self.assertFalse(annihilation_check(f + self.example.ring.gens()[0] ** 24, P).passed)
        self.assertTrue(presentation_hilbert_check(R, P, f.degree + max(P.generators.twists)).passed)

    def test_rank_condition_sampled(self):
        cm = chart_reduce(self.bm, 1)
        rc = rank_condition(cm, sample=0.1, seed=3)
        self.assertTrue(rc.result.passed, rc.result.witness)
        self.assertEqual(rc.result.provenance, EVIDENCE)
        self.assertTrue(depth_check(rc.det, rc.full).passed)

    def test_negative_control(self):
        self.assertTrue(negative_control(self.example, 1, 0, 4).passed)

    def test_bad_data_file(self):
        import tempfile
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'bad.txt'
            path.write_text('summands = O(0), O(-2)\nrows = 0, 2\nblock = 1-2 x 1-1\na(1,2) = x0\n')
            with self.assertRaises(DataFormatError):
                build_alpha_tilde(PARAMS, path)

if __name__ == '__main__':
    unittest.main()
