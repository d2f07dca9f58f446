import argparse
import re
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Optional

from beilinson import (beilinson_window, infer_split_type, o2_resolution, orthogonality_table,
                       weight_reduction_check, x_terms, y_terms, z_coeffs_table)
from cohom import cohomology_table, h_line, h_omega, h0_oracle_omega, line_bundle_table, verify_mondimfor
from common import (CLOSED_FORM, DEFAULT_PRIME, REPORT_SCHEMA, RESOLVED, CheckResult, ConfigError, FieldSpec,
                    NotSplitError, Timer, ToolkitError, banner, check, dump_report, info, iter_report_checks,
                    set_quiet, write_report)
from koszul import check_exactness, check_self_duality, koszul
from rescheck import chart_reduce, depth_check, rank_condition
from ring import Weights, hilbert_p, hilbert_series_coeffs
from surfex import (ExampleOptions, ParamSet, ThetaModel, build_alpha_tilde, build_canonical_ring, build_curve_ring,
                    build_theta_ring, curve_point_values, negative_control, projection_check, regular_sequence_check,
                    relations_at_points, verify_example)

ACCEPTANCE_WEIGHTS = ['1,1,1,1', '1,1,2,3', '1,2,3', '2,3,5']
O2_WEIGHTS = ACCEPTANCE_WEIGHTS + ['1,1,2,5']

@dataclass
class RunConfig:
    weights: Weights = field(default_factory=lambda: Weights((1, 1, 2, 3)))
    field: str = 'prime'
    prime: int = DEFAULT_PRIME
    seed: int = 0
    degree: Optional[int] = None
    max_degree: int = 12
    twist_min: Optional[int] = None
    twist_max: Optional[int] = None
    sheaf: str = 'O(0)'
    hilbert_window: int = 8
    generation_window: int = 10
    regular_window: int = 8
    euler_window: int = 12
    syzygy_bound: Optional[int] = None
    sample: float = 1.0
    chart: int = 1
    k_max: int = 4
    annihilation: str = 'presentation'
    points: int = 16
    workers: int = 1
    param_sets: int = 5
    negative_control: bool = True
    matrix: Optional[Path] = None
    output: Optional[Path] = None
    quiet: bool = False

    def validate(self) -> 'RunConfig':
        if self.field not in ('prime', 'QQ'):
            raise ConfigError(f"field must be 'prime' or 'QQ', got {self.field!r}")
        if not 0 < self.sample <= 1:
            raise ConfigError(f"sample must lie in (0, 1], got {self.sample}")
        if self.annihilation not in ('points', 'presentation'):
            raise ConfigError(f"annihilation must be 'points' or 'presentation', got {self.annihilation!r}")
        if self.annihilation == 'points' and self.field == 'QQ':
            raise ConfigError('points mode needs a prime field; use --annihilation presentation')
        for name in ('max_degree', 'hilbert_window', 'generation_window', 'regular_window', 'euler_window',
                     'points', 'workers', 'param_sets'):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.field == 'prime':
            FieldSpec(self.prime)
        return self

    @property
    def field_spec(self) -> FieldSpec:
        return FieldSpec(self.prime) if self.field == 'prime' else FieldSpec(None)

    def twist_window(self, default: tuple[int, int]) -> tuple[int, int]:
        lo = default[0] if self.twist_min is None else self.twist_min
        hi = default[1] if self.twist_max is None else self.twist_max
        if lo > hi:
            raise ConfigError(f"empty twist window [{lo}, {hi}]")
        return lo, hi

    def example_options(self) -> ExampleOptions:
        return ExampleOptions(field_spec=self.field_spec, seed=self.seed, hilbert_window=self.hilbert_window,
                              generation_window=self.generation_window, regular_window=self.regular_window,
                              euler_window=self.euler_window, chart=self.chart, k_max=self.k_max,
                              sample=self.sample, workers=self.workers, annihilation=self.annihilation,
                              points=self.points, presentation_bound=self.syzygy_bound or 16,
                              negative_control=self.negative_control)

    def to_json(self) -> dict:
        out = {}
        for f in fields(self):
            if f.name in ('output', 'quiet', 'workers'):
                continue
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, Weights) else str(v) if isinstance(v, Path) else v
        return out

def _bool(text: str) -> bool:
    if text.lower() in ('1', 'true', 'yes', 'on'):
        return True
    if text.lower() in ('0', 'false', 'no', 'off'):
        return False
    raise ConfigError(f"not a boolean: {text!r}")

def _optional_int(text: str) -> Optional[int]:
    return None if text.lower() in ('', 'none') else int(text)

CONVERTERS: dict[str, Callable] = {
    'weights': Weights.parse, 'field': str, 'prime': int, 'seed': int, 'degree': _optional_int,
    'max_degree': int, 'twist_min': _optional_int, 'twist_max': _optional_int, 'sheaf': str,
    'hilbert_window': int, 'generation_window': int, 'regular_window': int, 'euler_window': int,
    'syzygy_bound': _optional_int, 'sample': float, 'chart': int, 'k_max': int, 'annihilation': str,
    'points': int, 'workers': int, 'param_sets': int, 'negative_control': _bool, 'matrix': Path,
    'output': Path, 'quiet': _bool,
}

def read_config_file(path: Path) -> dict:
    """`key = value` lines; keys are RunConfig field names (dashes allowed)."""
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}")
    for lineno, line in enumerate(lines, 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"{path}:{lineno}: expected `key = value`")
        key, text = (s.strip() for s in line.split('=', 1))
        key = key.replace('-', '_')
        if key not in CONVERTERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = CONVERTERS[key](text)
        except ValueError as e:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {e}")
    return values

def load_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    cfg = RunConfig()
    if getattr(args, 'config', None):
        cfg = replace(cfg, **read_config_file(args.config))
    try:
        flags = {k: CONVERTERS[k](v) for k, v in vars(args).items() if k in CONVERTERS and v is not None}
    except ValueError as e:
        raise ConfigError(f"bad flag value: {e}")
    return replace(cfg, **flags).validate()

_SHEAF = re.compile(r'^(?:O\((-?\d+)\)|Omega(\d+)\((-?\d+)\))$')

def parse_sheaf(text: str, w: Weights):
    """`O(a)+O(b)+...` gives a list of twists; `Omega<j>(<t>)` gives ('omega', j, t)."""
    parts = [p.strip() for p in text.replace(' ', '').split('+') if p.strip()]
    lines, omegas = [], []
    for p in parts:
        match = _SHEAF.match(p)
        if not match:
            raise ConfigError(f"cannot parse sheaf {p!r}")
        if match.group(1) is not None:
            lines.append(int(match.group(1)))
        else:
            omegas.append(('omega', int(match.group(2)), int(match.group(3))))
    if omegas and (lines or len(omegas) > 1):
        raise ConfigError(f"{text!r}: either a sum of line bundles or a single Omega^j(t)")
    if omegas:
        _, j, t = omegas[0]
        if not 0 <= j <= w.n:
            raise ConfigError(f"Omega^{j} needs 0 <= j <= {w.n}")
        return omegas[0]
    return lines

# -- subcommands ------------------------------------------------------------------------

def cmd_hilbert(cfg: RunConfig, timer: Timer) -> dict:
    w = cfg.weights
    if cfg.degree is not None:
        return {'result': {'degree': cfg.degree, 'value': hilbert_p(w, cfg.degree), 'provenance': CLOSED_FORM},
                'checks': []}
    top = cfg.max_degree
    values = [hilbert_p(w, m) for m in range(top + 1)]
    series = hilbert_series_coeffs(w, top)
    identity = [l for l in range(-30, 31) if not verify_mondimfor(w, l)]
    checks = [check('generating_series', values == series, CLOSED_FORM, f"{values} != {series}"),
              check('alternating_sum_identity', not identity, CLOSED_FORM, f"fails at l = {identity[:3]}",
                    twists=[-30, 30])]
    return {'result': {'values': values, 'provenance': CLOSED_FORM}, 'checks': checks}

def cmd_koszul_check(cfg: RunConfig, timer: Timer) -> dict:
    w, F = cfg.weights, cfg.field_spec
    degrees = range(0, cfg.max_degree + 1)
    with timer.stage('koszul'):
        K = koszul(w, F)
        exact = check_exactness(K, degrees)
    checks = [check('dd_zero', K.check_dd(), RESOLVED, 'd o d != 0'),
              exact.as_check('koszul_homology', {(0, 0): 1}),
              check_self_duality(w, degrees, F)]
    return {'result': {'complex': K.to_json(), 'homology': {f'{p}@{d}': h for (p, d), h in exact.homology.items()}},
            'checks': checks}

def cmd_cohom_table(cfg: RunConfig, timer: Timer) -> dict:
    w, F = cfg.weights, cfg.field_spec
    sheaf = parse_sheaf(cfg.sheaf, w)
    window = cfg.twist_window(beilinson_window(w))
    with timer.stage('table'):
        table = cohomology_table(w, sheaf, window, F)
    checks = []
    lo, hi = window
    if isinstance(sheaf, tuple):
        _, j, t = sheaf
        bad = [l for l in range(lo, hi + 1) if h0_oracle_omega(w, j, t + l, F) != h_omega(w, 0, j, t + l)]
        checks.append(check('h0_oracle', not bad, RESOLVED, f"oracle disagrees at twist {bad[:3]}", j=j))
        serre = [l for l in range(lo, hi + 1) if h_omega(w, w.n, j, t + l) != h_omega(w, 0, w.n - j, -t - l)]
        checks.append(check('serre_symmetry', not serre, CLOSED_FORM, f"fails at {serre[:3]}"))
    else:
        serre = [l for l in range(lo, hi + 1) for m in sheaf
                 if h_line(w, w.n, m + l) != h_line(w, 0, -m - l - w.total)]
        checks.append(check('serre_symmetry', not serre, CLOSED_FORM, f"fails at {serre[:3]}"))
    return {'result': table.to_json(), 'checks': checks}

def cmd_beilinson_terms(cfg: RunConfig, timer: Timer) -> dict:
    w, F = cfg.weights, cfg.field_spec
    sheaf = parse_sheaf(cfg.sheaf, w)
    if isinstance(sheaf, tuple):
        raise ConfigError('beilinson-terms resolves sums of line bundles; use cohom-table for Omega^j')
    with timer.stage('hypercohomology'):
        table = line_bundle_table(w, sheaf, beilinson_window(w), F)
        X, Y = x_terms(w, table), y_terms(w, table)
    with timer.stage('orthogonality'):
        checks = [orthogonality_table(w, 'M', F), orthogonality_table(w, 'N', F)]
    rank = len(sheaf)
    checks += [check('euler_rank_X', X.euler_rank(w) == rank, RESOLVED, f"X has Euler rank {X.euler_rank(w)}"),
               check('euler_rank_Y', Y.euler_rank(w) == rank, RESOLVED, f"Y has Euler rank {Y.euler_rank(w)}"),
               weight_reduction_check(w, sheaf, F)]
    return {'result': {'X': X.to_json(), 'Y': Y.to_json(), 'X_render': X.render(), 'Y_render': Y.render()},
            'checks': checks}

def cmd_o2_resolution(cfg: RunConfig, timer: Timer) -> dict:
    w, F = cfg.weights, cfg.field_spec
    closed = o2_resolution(w)
    with timer.stage('hypercohomology'):
        resolved = y_terms(w, line_bundle_table(w, [2], beilinson_window(w), F))
    same = closed.same_terms(resolved)
    return {'result': {'terms': closed.to_json(), 'render': closed.render(),
                       'z': {str(j): list(v) for j, v in z_coeffs_table(w).items()}},
            'checks': [check('o2_closed_vs_resolved', same, RESOLVED,
                             f"closed form {closed} differs from resolved {resolved}")]}

def _params(cfg: RunConfig) -> ParamSet:
    return ParamSet.random(cfg.field_spec, cfg.seed)

def cmd_rank_condition(cfg: RunConfig, timer: Timer) -> dict:
    params = _params(cfg)
    example = build_alpha_tilde(params, cfg.matrix)
    info("\nStarting rank condition with:")
    info(f"Field:        {params.field.name}")
    info(f"Chart:        x{cfg.chart}")
    info(f"Sample:       {cfg.sample}")
    info(f"Workers:      {cfg.workers}")
    with timer.stage('minors'):
        cm = chart_reduce(example.bundle_map(), cfg.chart)
        rc = rank_condition(cm, k_max=cfg.k_max, sample=cfg.sample, seed=cfg.seed, workers=cfg.workers)
    checks = [rc.result, depth_check(rc.det, rc.full)]
    if cfg.negative_control and params.field.is_prime:
        with timer.stage('negative_control'):
            checks.append(negative_control(example, cfg.chart, cfg.seed, cfg.k_max))
    return {'result': {'params': params.to_json(), 'det_degree': rc.det.degree}, 'checks': checks}

def cmd_verify_example(cfg: RunConfig, timer: Timer) -> dict:
    report = verify_example(_params(cfg), cfg.example_options(), timer)
    checks = [CheckResult(c['name'], c['status'], c['provenance'], c['details'], c.get('witness'))
              for c in report.pop('checks')]
    report.pop('passed')
    report.pop('schema')
    return {'result': report, 'checks': checks}

def _ring_checks(R, cfg: RunConfig, model_points: Callable) -> list[CheckResult]:
    checks = [R.hilbert_check(range(0, cfg.hilbert_window + 1))]
    if cfg.field_spec.is_prime:
        checks.append(relations_at_points(R, model_points()))
    return checks

def cmd_curve_ring(cfg: RunConfig, timer: Timer) -> dict:
    params = _params(cfg)
    with timer.stage('ring'):
        R = build_curve_ring(params)
        model = ThetaModel(params, cfg.seed) if params.field.is_prime else None
        checks = _ring_checks(R, cfg, lambda: [curve_point_values(model) for _ in range(cfg.points)])
    return {'result': {'params': params.to_json(), 'ring': R.to_json()}, 'checks': checks}

def cmd_theta_ring(cfg: RunConfig, timer: Timer) -> dict:
    params = _params(cfg)
    with timer.stage('ring'):
        R = build_theta_ring(params)
        model = ThetaModel(params, cfg.seed) if params.field.is_prime else None
        checks = _ring_checks(R, cfg, lambda: model.points(cfg.points))
    return {'result': {'params': params.to_json(), 'ring': R.to_json()}, 'checks': checks}

def cmd_canonical_ring(cfg: RunConfig, timer: Timer) -> dict:
    params = _params(cfg)
    with timer.stage('ring'):
        R = build_canonical_ring(params)
        model = ThetaModel(params, cfg.seed) if params.field.is_prime else None
        checks = _ring_checks(R, cfg, lambda: model.points(cfg.points))
        checks += [regular_sequence_check(R, cfg.regular_window), projection_check(R)]
    return {'result': {'params': params.to_json(), 'ring': R.to_json(),
                       'projection': R.projection.to_json()}, 'checks': checks}

def cmd_split_type(cfg: RunConfig, timer: Timer) -> dict:
    w = cfg.weights
    sheaf = parse_sheaf(cfg.sheaf, w)
    if isinstance(sheaf, tuple):
        _, j, t = sheaf
        h0 = lambda l: h_omega(w, 0, j, t + l)
    else:
        h0 = lambda l: sum(h_line(w, 0, m + l) for m in sheaf)
    window = cfg.twist_window((-cfg.max_degree, cfg.max_degree))
    try:
        twists = infer_split_type(h0, w, window)
    except NotSplitError as e:
        return {'result': {'split': False, 'window': list(window)},
                'checks': [check('split_type', False, CLOSED_FORM, str(e))]}
    return {'result': {'split': True, 'twists': twists, 'window': list(window)},
            'checks': [check('split_type', True, CLOSED_FORM)]}

def cmd_all_checks(cfg: RunConfig, timer: Timer) -> dict:
    """The acceptance sweep: combinatorics and Koszul data for several weight vectors,
    ring Hilbert functions for several parameter sets, then the example."""
    sections = {}

    def section(name: str, command, sub: RunConfig):
        banner(name)
        out = command(sub, timer)
        sections[name] = {'result': out['result'], 'checks': [c.to_json() for c in out['checks']]}

    for text in ACCEPTANCE_WEIGHTS:
        w = Weights.parse(text)
        section(f'hilbert {w}', cmd_hilbert, replace(cfg, weights=w, degree=None))
        section(f'koszul {w}', cmd_koszul_check, replace(cfg, weights=w))
        for j in range(w.n + 1):
            section(f'cohom {w} Omega{j}', cmd_cohom_table,
                    replace(cfg, weights=w, sheaf=f'Omega{j}(0)', twist_min=-10, twist_max=10))
    for text in O2_WEIGHTS:
        w = Weights.parse(text)
        if w.n >= 2:
            section(f'o2 {w}', cmd_o2_resolution, replace(cfg, weights=w))
    example_w = Weights((1, 1, 2, 3))
    section('beilinson (1,1,2,3)', cmd_beilinson_terms, replace(cfg, weights=example_w, sheaf='O(0)'))
    fields_to_try = [replace(cfg, seed=cfg.seed + k) for k in range(cfg.param_sets)]
    fields_to_try.append(replace(cfg, field='QQ', seed=cfg.seed))
    for sub in fields_to_try:
        tag = f'{sub.field_spec.name} seed {sub.seed}'
        section(f'theta ring {tag}', cmd_theta_ring, sub)
        section(f'canonical ring {tag}', cmd_canonical_ring, sub)
    section('curve ring', cmd_curve_ring, cfg)
    section('example', cmd_verify_example, replace(cfg, weights=example_w))
    return {'result': {'sections': sections}, 'checks': []}

COMMANDS = {
    'hilbert': (cmd_hilbert, 'Hilbert function p_m(w) of the weighted polynomial ring'),
    'koszul-check': (cmd_koszul_check, 'homology and self-duality of the Koszul complex'),
    'cohom-table': (cmd_cohom_table, 'cohomology table of a sum of O(a) or of Omega^j(t)'),
    'beilinson-terms': (cmd_beilinson_terms, 'terms of both Beilinson resolutions of a sum of line bundles'),
    'o2-resolution': (cmd_o2_resolution, 'closed-form resolution of O(2) against the resolved one'),
    'rank-condition': (cmd_rank_condition, 'rank condition of the example matrix on a chart'),
    'verify-example': (cmd_verify_example, 'every check on the surface with p_g = q = 2, K^2 = 4'),
    'curve-ring': (cmd_curve_ring, 'the ring of the genus 2 curve'),
    'theta-ring': (cmd_theta_ring, 'the ring of theta functions'),
    'canonical-ring': (cmd_canonical_ring, 'the canonical ring of the example surface'),
    'split-type': (cmd_split_type, 'split type of a sheaf from its h^0'),
    'run': (cmd_all_checks, 'run a suite (--all-checks)'),
}

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Weighted Beilinson resolutions and symmetric resolution checks')
    sub = parser.add_subparsers(dest='command')
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument('--config', type=Path, help='key = value file; explicit flags win')
        p.add_argument('--weights', help='comma separated weights (default: 1,1,2,3)')
        p.add_argument('--field', choices=['prime', 'QQ'], help='coefficient field (default: prime)')
        p.add_argument('--prime', help=f'characteristic of the prime field (default: {DEFAULT_PRIME})')
        p.add_argument('--seed', help='seed for every random choice (default: 0)')
        p.add_argument('--output', help='report path; .zst compresses, timings go to <path>.timings.json')
        p.add_argument('--quiet', action='store_const', const='true', help='no banners or progress bars')
        p.add_argument('--workers', help='processes for the membership tests (default: 1)')
        if name in ('hilbert', 'koszul-check', 'split-type', 'run'):
            p.add_argument('--degree', help='single degree (hilbert)')
            p.add_argument('--max-degree', dest='max_degree', help='top degree of tables (default: 12)')
        if name in ('cohom-table', 'beilinson-terms', 'split-type'):
            p.add_argument('--sheaf', help="e.g. 'O(0)+O(-2)' or 'Omega1(-1)'")
            p.add_argument('--twist-min', dest='twist_min')
            p.add_argument('--twist-max', dest='twist_max')
        if name in ('rank-condition', 'verify-example', 'curve-ring', 'theta-ring', 'canonical-ring', 'run'):
            p.add_argument('--hilbert-window', dest='hilbert_window')
            p.add_argument('--generation-window', dest='generation_window')
            p.add_argument('--regular-window', dest='regular_window')
            p.add_argument('--euler-window', dest='euler_window')
            p.add_argument('--sample', help='fraction of minors tested, in (0, 1]')
            p.add_argument('--chart', help='weight-1 variable of the chart (default: 1)')
            p.add_argument('--k-max', dest='k_max', help='largest power of the chart variable allowed')
            p.add_argument('--annihilation', choices=['points', 'presentation'],
                           help='presentation (exact, default) or points (sampled)')
            p.add_argument('--points', help='sample points of the surface (default: 16)')
            p.add_argument('--param-sets', dest='param_sets', help='random parameter sets for run --all-checks')
            p.add_argument('--negative-control', dest='negative_control', help='true/false')
            p.add_argument('--syzygy-bound', dest='syzygy_bound')
            p.add_argument('--matrix', help='matrix data file (default: data/alpha_tilde.txt)')
        if name == 'run':
            p.add_argument('--all-checks', action='store_true', help='run every suite')
    return parser

def run(command: str, cfg: RunConfig, args: Optional[argparse.Namespace] = None) -> tuple[dict, Timer]:
    if command == 'run' and not getattr(args, 'all_checks', False):
        raise ConfigError('run needs --all-checks')
    handler, _ = COMMANDS[command]
    timer = Timer()
    out = handler(cfg, timer)
    checks = [c.to_json() for c in out['checks']]
    report = {'schema': REPORT_SCHEMA, 'command': command, 'config': cfg.to_json(),
              'result': out['result'], 'checks': checks}
    report['passed'] = all(c['status'] != 'fail' for c in iter_report_checks(report))
    return report, timer

def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    try:
        cfg = load_config(args)
        # stdout carries the report when there is no output file
        set_quiet(cfg.quiet or cfg.output is None)
        report, timer = run(args.command, cfg, args)
    except ToolkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("\nReceived interrupt signal. Shutting down gracefully...", file=sys.stderr)
        return 1
    finally:
        set_quiet(False)
    if cfg.output is not None:
        write_report(report, cfg.output, timer.durations)
        info(f"\nReport written to {cfg.output} ({'pass' if report['passed'] else 'FAIL'})")
    else:
        sys.stdout.write(dump_report(report))
    return 0 if report['passed'] else 1


import unittest
import json
import tempfile

class TestConfig(unittest.TestCase):
    def test_precedence(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'run.conf'
            path.write_text('# example\nseed = 5\nsample = 0.5\nweights = 1,1,1,1\n')
            args = build_parser().parse_args(['hilbert', '--config', str(path), '--seed', '9'])
            cfg = load_config(args)
        self.assertEqual(cfg.seed, 9)
        self.assertEqual(cfg.sample, 0.5)
        self.assertEqual(tuple(cfg.weights), (1, 1, 1, 1))
        self.assertEqual(cfg.prime, DEFAULT_PRIME)

    def test_validation(self):
        with self.assertRaises(ConfigError):
            RunConfig(sample=0).validate()
        with self.assertRaises(ConfigError):
            RunConfig(field='GF4').validate()
        with self.assertRaises(ConfigError):
            RunConfig(prime=15).validate()
        with self.assertRaises(ConfigError):
            RunConfig(field='QQ', annihilation='points').validate()
        self.assertTrue(RunConfig(field='QQ').validate())
        self.assertEqual(RunConfig().annihilation, 'presentation')

    def test_unknown_config_key(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'run.conf'
            path.write_text('colour = blue\n')
            with self.assertRaises(ConfigError):
                read_config_file(path)

    def test_sheaf_parsing(self):
        w = Weights((1, 1, 2, 3))
        self.assertEqual(parse_sheaf('O(0) + O(-2)', w), [0, -2])
        self.assertEqual(parse_sheaf('Omega1(-1)', w), ('omega', 1, -1))
        with self.assertRaises(ConfigError):
            parse_sheaf('O(0)+Omega1(0)', w)
        with self.assertRaises(ConfigError):
            parse_sheaf('Omega5(0)', w)

class TestCommands(unittest.TestCase):
    def _run(self, *argv) -> tuple[int, dict, Path]:
        tmp = tempfile.mkdtemp()
        out = Path(tmp) / 'report.json'
        code = main(list(argv) + ['--output', str(out), '--quiet'])
        return code, (json.loads(out.read_text()) if out.exists() else {}), out

    def test_hilbert(self):
        code, report, _ = self._run('hilbert', '--weights', '1,1,2,3', '--degree', '2')
        self.assertEqual(code, 0)
        self.assertEqual(report['result']['value'], 4)
        self.assertEqual(report['result']['provenance'], CLOSED_FORM)
        self.assertEqual(report['config']['weights'], [1, 1, 2, 3])

    def test_hilbert_table(self):
        code, report, out = self._run('hilbert', '--weights', '1,2,3', '--max-degree', '6')
        self.assertEqual(code, 0)
        self.assertEqual(report['result']['values'], [1, 1, 2, 3, 4, 5, 7])
        self.assertTrue(Path(str(out) + '.timings.json').exists())
        self.assertNotIn('timings', report)

    def test_o2_resolution(self):
        code, report, _ = self._run('o2-resolution', '--weights', '1,1,2,3')
        self.assertEqual(code, 0)
        self.assertEqual(report['result']['z']['-1'], [0, 1])
        self.assertEqual(report['result']['z']['-3'], [1, 0])

    def test_usage_errors(self):
        code, _, _ = self._run('hilbert', '--weights', '1,x,2')
        self.assertEqual(code, 2)
        code, _, _ = self._run('beilinson-terms', '--sheaf', 'Omega1(0)')
        self.assertEqual(code, 2)
        code, _, _ = self._run('run')
        self.assertEqual(code, 2)

    def test_split_type(self):
        code, report, _ = self._run('split-type', '--sheaf', 'O(1)+O(-2)', '--max-degree', '8')
        self.assertEqual(code, 0)
        self.assertEqual(report['result']['twists'], [1, -2])
        code, report, _ = self._run('split-type', '--sheaf', 'Omega1(2)', '--twist-min', '-4',
                                     '--twist-max', '10')
        self.assertEqual(code, 1)
        self.assertFalse(report['result']['split'])

    def test_deterministic_reports(self):
        _, _, a = self._run('canonical-ring', '--seed', '3', '--hilbert-window', '4', '--regular-window', '3',
                            '--points', '4')
        _, _, b = self._run('canonical-ring', '--seed', '3', '--hilbert-window', '4', '--regular-window', '3',
                            '--points', '4')
        self.assertEqual(a.read_bytes(), b.read_bytes())

    def test_compressed_output(self):
        tmp = tempfile.mkdtemp()
        out = Path(tmp) / 'report.json.zst'
        self.assertEqual(main(['hilbert', '--degree', '5', '--output', str(out), '--quiet']), 0)
        from common import read_report
        self.assertEqual(read_report(out)['result']['value'], hilbert_p(Weights((1, 1, 2, 3)), 5))

if __name__ == '__main__':
    if len(sys.argv) > 1 and sys.argv[1] in COMMANDS:
        sys.exit(main())
    unittest.main()
