"""
命令注册与分发: 每个命令一个处理函数, 返回 Report。
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

from eqdeform.config import Config, settings
from eqdeform.models.problem import ProblemFile
from eqdeform.models.report import Report
from eqdeform.services.ambient import choose_ambient
from eqdeform.services.cohomology import CohomologyClass
from eqdeform.services.deform import (
    Deformation, TruncatedSeries, default_truncation, deformation_from_base, enumerate_lifts,
    eps_ring, iso_witness, lift_step, obstruction_space, realize_isomorphism,
    same_ideal, tangent_spaces, trivial_deformation, verify_deformation,
)
from eqdeform.services.gaction import check_twist_compatibility, twist_matrices, verify_stability
from eqdeform.services.ramify import (
    fixed_space_dimension, local_ext1_invariants, ramify_field, tame_different, twist_weight,
)
from eqdeform.utils.error_handler import EXIT_INPUT, EXIT_OBSTRUCTED, InputError

logger = logging.getLogger(__name__)

COMMANDS: Dict[str, Callable[['RunContext'], Report]] = {}


def command(name: str):
    def register(func):
        COMMANDS[name] = func
        return func
    return register


@dataclass
class RunContext:
    problems: List[ProblemFile]
    flags: Dict[str, object] = field(default_factory=dict)
    config: Config = settings

    @property
    def problem(self) -> ProblemFile:
        if not self.problems:
            raise InputError("this command needs a problem file")
        return self.problems[0]

    def value(self, key: str, default=None):
        """命令行参数优先于问题文件中的 option"""
        if self.flags.get(key) is not None:
            return self.flags[key]
        if self.problems and self.problems[0].option(key) is not None:
            return self.problems[0].option(key)
        return default

    @property
    def slack(self) -> int:
        return self.value('slack', self.config.slice_slack)

    def setup(self):
        problem = self.problem
        p = problem.presentation()
        g = problem.group(self.value('group_bound', self.config.group_bound))
        return p, g


def run(name: str, problems: Sequence[ProblemFile], flags: Dict[str, object] = None,
        config: Config = None) -> Report:
    handler = COMMANDS.get(name)
    if handler is None:
        raise InputError(f"unknown command '{name}'")
    ctx = RunContext(list(problems), dict(flags or {}), config or settings)
    logger.info(f"running {name} on {[p.source for p in ctx.problems]}")
    return handler(ctx)


def _render_element(values) -> str:
    if len(values) == 1:
        return str(values[0])
    return "(" + ", ".join(str(v) for v in values) + ")"


def _render_key(ring, rank: int, key) -> str:
    pos, exps = key
    mono = str(ring.monomial(exps))
    if rank == 1:
        return mono
    return f"e{pos + 1}" if mono == "1" else f"{mono}*e{pos + 1}"


def _render_class(c: CohomologyClass, labels: Sequence[str]) -> Dict[str, str]:
    return {label: _render_element(v) for label, v in zip(labels, c.values)}


@command('check')
def check(ctx: RunContext) -> Report:
    """稳定性、正则序列与群阶"""
    problem = ctx.problem
    p, g = ctx.setup()
    stable = verify_stability(p.gb, g, p.gens)
    details = {
        'regular_sequence': p.certificate.regular,
        'dimension': p.certificate.dimension,
        'stable': stable,
        'latin_square': g.is_latin_square(),
        'tame': g.is_tame(),
        'group': g.labels,
    }
    report = Report('check', field=problem.field_spec, group_order=g.order, details=details)
    if not stable:
        report.exit_code = EXIT_INPUT
        return report
    amb = choose_ambient(p, g, ctx.value('ambient', 'auto'))
    twist = twist_matrices(amb.presentation.gens, amb.group, amb.presentation.gb)
    details['twist_compatible'] = check_twist_compatibility(twist, amb.group, amb.presentation.gb)
    details['ambient'] = amb.describe()
    report.truncation = ctx.value('truncate', default_truncation(amb))
    return report


@command('tangent')
def tangent(ctx: RunContext) -> Report:
    """T⁰_G, T¹ 与 T¹_G"""
    problem = ctx.problem
    p, g = ctx.setup()
    amb = choose_ambient(p, g, ctx.value('ambient', 'auto'))
    trunc = ctx.value('truncate', default_truncation(amb))
    spaces = tangent_spaces(p, g, amb, trunc, ctx.slack)
    details = {
        'ambient': amb.kind,
        't0_basis': [_render_element(D) for D in spaces.t0_equivariant],
        't1_basis': ", ".join(_render_key(p.ring, p.codim, k) for k in spaces.t1.keys),
        't1_finite': spaces.t1.finite,
        't1_equivariant_basis': [_render_element(v) for v in spaces.t1_equivariant],
    }
    return Report('tangent', field=problem.field_spec, group_order=g.order,
                  t0_dim=len(spaces.t0_equivariant), t1_dim=spaces.t1_dimension,
                  t1_equivariant_dim=spaces.t1_equivariant_dimension, certified=spaces.certified,
                  truncation=trunc, details=details)


@command('obstruction')
def obstruction(ctx: RunContext) -> Report:
    """H¹(G, N) 的分片维数与代表元"""
    problem = ctx.problem
    p, g = ctx.setup()
    amb = choose_ambient(p, g, ctx.value('ambient', 'auto'))
    trunc = ctx.value('truncate', default_truncation(amb))
    space = obstruction_space(p, g, amb, trunc, ctx.slack)
    labels = amb.group.labels
    details = {
        'ambient': amb.kind,
        'representatives': [_render_class(c, labels) for c in space.representatives],
    }
    if space.cohomology is not None:
        details['z1_dim'] = space.cohomology.z1_dimension
        details['b1_dim'] = space.cohomology.b1_dimension
        details['graded'] = space.cohomology.graded
    if space.certified != 'exact':
        # 分片单调性记录
        details['dimension_at_next_degree'] = obstruction_space(p, g, amb, trunc + 1, ctx.slack).dimension
    return Report('obstruction', field=problem.field_spec, group_order=g.order,
                  obstruction_dim=space.dimension, certified=space.certified,
                  truncation=trunc, details=details)


def _classify(lifts: List[Deformation], trunc: int, slack: int) -> List[int]:
    """按同构类分组, 返回每个提升所属类的编号"""
    reps: List[Deformation] = []
    classes = []
    for d in lifts:
        for i, r in enumerate(reps):
            if iso_witness(r, d, trunc, slack) is not None:
                classes.append(i)
                break
        else:
            reps.append(d)
            classes.append(len(reps) - 1)
    return classes


@command('lift')
def lift(ctx: RunContext) -> Report:
    """逐阶提升平凡形变; 受阻时给出障碍类"""
    problem = ctx.problem
    p, g = ctx.setup()
    amb = choose_ambient(p, g, ctx.value('ambient', 'auto'))
    trunc = ctx.value('truncate', default_truncation(amb))
    order = ctx.value('order', 1)
    if order < 0:
        raise InputError("lift order must be non-negative")
    slack = ctx.slack

    steps = []
    current = trivial_deformation(amb, 0)
    outcome = None
    while current.order < order:
        outcome = lift_step(current, trunc, slack)
        if outcome.obstructed:
            break
        current = outcome.deformation
        steps.append({'order': current.order, 'generators': current.render()})

    report = Report('lift', field=problem.field_spec, group_order=g.order, lifts=steps,
                    truncation=trunc, certified='exact')
    if outcome is not None and outcome.obstructed:
        report.certified = outcome.certified
        report.details['obstructed_at'] = current.order
        report.details['obstruction'] = _render_class(outcome.obstruction, amb.group.labels)
        report.exit_code = EXIT_OBSTRUCTED
        return report

    if ctx.flags.get('enumerate') and current.order >= 1:
        spaces = tangent_spaces(p, g, amb, trunc, slack)
        lifts = enumerate_lifts(current, spaces.t1_equivariant, ctx.config.enumeration_limit)
        classes = _classify(lifts, trunc, slack)
        report.lifts = steps[:-1] + [
            {'order': d.order, 'generators': d.render(), 'class': c} for d, c in zip(lifts, classes)
        ]
        report.t1_equivariant_dim = spaces.t1_equivariant_dimension
        report.details['isomorphism_classes'] = len(set(classes))
    return report


def _deformation(problem: ProblemFile, amb) -> Deformation:
    ring = eps_ring(amb.base.ring)
    order, polys = problem.deformation_polynomials(ring)
    series = [TruncatedSeries.from_eps_polynomial(f, amb.base.ring, order) for f in polys]
    d = deformation_from_base(amb, order, series)
    cert = verify_deformation(d)
    if not cert.ok:
        raise InputError(f"{problem.source or 'problem'}: " + "; ".join(cert.failures))
    return d


@command('iso')
def iso(ctx: RunContext) -> Report:
    """两个形变之间的同构见证"""
    if len(ctx.problems) != 2:
        raise InputError("iso needs exactly two problem files")
    first, second = ctx.problems
    if first.base_form() != second.base_form():
        raise InputError("the two problem files describe different base problems")
    p, g = ctx.setup()
    amb = choose_ambient(p, g, ctx.value('ambient', 'auto'))
    trunc = ctx.value('truncate', default_truncation(amb))
    d1 = _deformation(first, amb)
    d2 = _deformation(second, amb)
    witness = iso_witness(d1, d2, trunc, ctx.slack)
    report = Report('iso', field=first.field_spec, group_order=g.order, truncation=trunc,
                    certified='exact' if witness is not None else f'slice:{trunc + ctx.slack}')
    report.details['order'] = d1.order
    if witness is None:
        report.details['isomorphic'] = 'none at slice'
        return report
    report.witness = [str(c) for c in witness.components]
    report.details['witness_exact'] = witness.exact
    if d1.order >= 1:
        _, moved = realize_isomorphism(d1, witness)
        report.details['verified'] = same_ideal(moved, d2)
    return report


@command('ramify')
def ramify(ctx: RunContext) -> Report:
    """分歧点处 Ext¹ 的不变量"""
    d = ctx.flags.get('d')
    m = ctx.flags.get('m')
    if d is None or m is None:
        raise InputError("ramify needs --d and --m")
    p = ctx.flags.get('p')
    k = ramify_field(p)
    value = local_ext1_invariants(d, m, k)
    details = {
        'd': d,
        'm': m,
        'twist_weight': twist_weight(d),
        'invariants': value,
        'fixed_space': fixed_space_dimension(d, m, k),
        'tame_different': d == tame_different(m),
    }
    return Report('ramify', field='Q' if p is None else f'F {p}', group_order=m, details=details)
