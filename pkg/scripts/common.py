import io
import json
import random
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
import zstandard
from sympy import isprime
from tqdm import tqdm

DEFAULT_PRIME = 65521
REPORT_SCHEMA = 'weighted-beilinson/1'

# provenance tags carried by every numeric claim in a report
CLOSED_FORM = 'closed-form'
RESOLVED = 'resolved'
EVIDENCE = 'evidence-level'
PAPER_SUPPLIED = 'paper-supplied'
USER_SUPPLIED = 'user-supplied'

QUIET = False

class ToolkitError(ValueError):
    """Base class for malformed input. Mathematical failures are reported, not raised."""

class DegreeMismatchError(ToolkitError):
    pass

class WindowError(ToolkitError):
    pass

class ChartError(ToolkitError):
    pass

class ConfigError(ToolkitError):
    pass

class DataFormatError(ToolkitError):
    pass

class InconsistentInvariantsError(ToolkitError):
    pass

class NotSplitError(ToolkitError):
    pass

def set_quiet(value: bool):
    global QUIET
    QUIET = value

def banner(message: str):
    if not QUIET:
        print(f"### {message}")

def info(message: str):
    if not QUIET:
        print(message)

def progress(iterable, **kwargs):
    """tqdm wrapper that respects the quiet switch."""
    return tqdm(iterable, disable=QUIET, leave=False, **kwargs)

@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: GF(p) for an odd prime p, or the rationals when prime is None.

    Prime-field elements are plain ints in [0, p); rationals are Fractions.
    """
    prime: Optional[int] = DEFAULT_PRIME

    def __post_init__(self):
        if self.prime is not None:
            if self.prime == 2 or not isprime(self.prime):
                raise ConfigError(f"field characteristic must be an odd prime, got {self.prime}")
            if self.prime >= 2 ** 31:
                raise ConfigError(f"prime {self.prime} too large for int64 kernels")

    @classmethod
    def parse(cls, text: str) -> 'FieldSpec':
        text = text.strip()
        if text.upper() in ('QQ', 'Q', 'RATIONALS'):
            return cls(None)
        if text.upper().startswith('GF(') and text.endswith(')'):
            text = text[3:-1]
        try:
            return cls(int(text))
        except ValueError:
            raise ConfigError(f"cannot parse field spec {text!r}")

    @property
    def is_prime(self) -> bool:
        return self.prime is not None

    @property
    def name(self) -> str:
        return f"GF({self.prime})" if self.is_prime else 'QQ'

    def __call__(self, x):
        """Coerce an int, Fraction or sympy Rational into the field."""
        if self.is_prime:
            if isinstance(x, int):
                return x % self.prime
            num, den = _num_den(x)
            if den % self.prime == 0:
                raise ZeroDivisionError(f"denominator {den} vanishes mod {self.prime}")
            return num * pow(den, -1, self.prime) % self.prime
        if isinstance(x, Fraction):
            return x
        num, den = _num_den(x)
        return Fraction(num, den)

    def zero(self):
        return 0 if self.is_prime else Fraction(0)

    def one(self):
        return 1 if self.is_prime else Fraction(1)

    def add(self, a, b):
        return (a + b) % self.prime if self.is_prime else a + b

    def sub(self, a, b):
        return (a - b) % self.prime if self.is_prime else a - b

    def mul(self, a, b):
        return a * b % self.prime if self.is_prime else a * b

    def neg(self, a):
        return -a % self.prime if self.is_prime else -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError('inverse of zero')
        return pow(a, -1, self.prime) if self.is_prime else 1 / a

    def random(self, rng: random.Random, nonzero: bool = False):
        """Uniform element for GF(p); small random rational for QQ."""
        while True:
            if self.is_prime:
                x = rng.randrange(self.prime)
            else:
                x = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
            if x != 0 or not nonzero:
                return x

    def to_json(self, a):
        if self.is_prime:
            return a
        return str(a)

    def dtype(self):
        return np.int64 if self.is_prime else object

def _num_den(x) -> tuple[int, int]:
    if isinstance(x, int):
        return x, 1
    if isinstance(x, Fraction):
        return x.numerator, x.denominator
    # sympy Rational and gmpy/flint mpq all expose these
    if hasattr(x, 'p') and hasattr(x, 'q'):
        return int(x.p), int(x.q)
    return int(x.numerator), int(x.denominator)

def make_rng(seed: int) -> random.Random:
    """All randomness of a run funnels through one seeded generator."""
    return random.Random(seed)

@dataclass
class CheckResult:
    """Outcome of one verification step."""
    name: str
    status: str
    provenance: str = RESOLVED
    details: dict = field(default_factory=dict)
    witness: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status != 'fail'

    def to_json(self) -> dict:
        out = {'name': self.name, 'status': self.status, 'provenance': self.provenance,
               'details': self.details}
        if self.witness is not None:
            out['witness'] = self.witness
        return out

def check(name: str, ok: bool, provenance: str = RESOLVED, witness: Optional[str] = None, **details) -> CheckResult:
    return CheckResult(name, 'pass' if ok else 'fail', provenance, details, None if ok else witness)

class Timer:
    """Collects wall-clock durations per stage; kept out of reports so those stay deterministic."""
    def __init__(self):
        self.durations: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.durations[name] = self.durations.get(name, 0.0) + time.perf_counter() - start

def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + '\n'

def write_report(report: dict, path: Path, timings: Optional[dict] = None):
    """Write a JSON report, zstd-compressed when the path ends with .zst.

    Timings go to a sidecar file next to the report.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = dump_report(report).encode('utf-8')
    if path.suffix == '.zst':
        # no content size or checksum in the frame header so the bytes only depend on the data
        cctx = zstandard.ZstdCompressor(level=10, write_content_size=False)
        data = cctx.compress(data)
    path.write_bytes(data)
    if timings is not None:
        sidecar = path.with_name(path.name + '.timings.json')
        sidecar.write_text(json.dumps(timings, sort_keys=True, indent=2) + '\n')

def read_report(path: Path) -> dict:
    """Read a report written by write_report (plain or .zst)."""
    path = Path(path)
    if path.suffix != '.zst':
        return json.loads(path.read_text())
    with open(path, 'rb') as fh:
        reader = zstandard.ZstdDecompressor().stream_reader(fh)
        return json.load(io.TextIOWrapper(reader, encoding='utf-8'))

def iter_report_checks(report: dict) -> Iterator[dict]:
    """Walk every check record in a (possibly nested) report."""
    stack = [report]
    while stack:
        node = stack.pop()
        if isinstance(node, dict):
            if 'status' in node and 'name' in node:
                yield node
            stack.extend(reversed(list(node.values())))
        elif isinstance(node, list):
            stack.extend(reversed(node))

import unittest
import tempfile

class TestFieldSpec(unittest.TestCase):
    def test_prime_arithmetic(self):
        """Coercion and inverses in GF(p)."""
        F = FieldSpec(7)
        self.assertEqual(F(10), 3)
        self.assertEqual(F(Fraction(1, 2)), 4)
        self.assertEqual(F.mul(F.inv(3), 3), 1)
        self.assertEqual(F.neg(2), 5)

    def test_rationals(self):
        F = FieldSpec(None)
        self.assertEqual(F(3), Fraction(3))
        self.assertEqual(F.inv(Fraction(2, 3)), Fraction(3, 2))
        self.assertEqual(F.name, 'QQ')

    def test_rejects_bad_primes(self):
        with self.assertRaises(ConfigError):
            FieldSpec(2)
        with self.assertRaises(ConfigError):
            FieldSpec(15)

    def test_parse(self):
        self.assertEqual(FieldSpec.parse('GF(65521)').prime, 65521)
        self.assertIsNone(FieldSpec.parse('QQ').prime)
        with self.assertRaises(ConfigError):
            FieldSpec.parse('reals')

    def test_zero_denominator_mod_p(self):
        with self.assertRaises(ZeroDivisionError):
            FieldSpec(5)(Fraction(1, 10))

class TestReports(unittest.TestCase):
    def test_round_trip_plain_and_zst(self):
        report = {'schema': REPORT_SCHEMA, 'checks': [check('a', True).to_json()]}
        with tempfile.TemporaryDirectory() as tmp:
            for name in ('r.json', 'r.json.zst'):
                path = Path(tmp) / name
                write_report(report, path, timings={'a': 0.1})
                self.assertEqual(read_report(path), report)
                self.assertTrue((Path(tmp) / (name + '.timings.json')).exists())

    def test_deterministic_bytes(self):
        report = {'b': 1, 'a': [1, 2]}
        with tempfile.TemporaryDirectory() as tmp:
            p1, p2 = Path(tmp) / 'x.json.zst', Path(tmp) / 'y.json.zst'
            write_report(report, p1, timings={'t': 1.0})
            write_report(report, p2, timings={'t': 2.0})
            self.assertEqual(p1.read_bytes(), p2.read_bytes())

    def test_iter_checks(self):
        report = {'x': {'inner': [check('a', True).to_json(), check('b', False, witness='w').to_json()]}}
        names = [c['name'] for c in iter_report_checks(report)]
        self.assertEqual(names, ['a', 'b'])

if __name__ == '__main__':
    unittest.main()
