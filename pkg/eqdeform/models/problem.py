"""
问题文件: 行式语法

    field Q | field F <p>
    vars <ident>+
    ideal: <poly> (; <poly>)*
    gen <name>: <var> -> <poly> (, <var> -> <poly>)*
    option <key> = <value>
    deform <m>: <poly> (; <poly>)*      (ε 写作 eps)
    # 注释
"""
import logging
import re
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from eqdeform.algebra.polynomial import Polynomial, PolynomialRing, parse_polynomial
from eqdeform.algebra.scalar import Field, field_from_spec
from eqdeform.services.ambient import AMBIENT_PATHS, AffinePresentation, build_presentation
from eqdeform.services.gaction import GroupAction, Substitution, close_group, trivial_group
from eqdeform.utils.error_handler import InputError, ProblemSyntaxError

logger = logging.getLogger(__name__)

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
INT_OPTIONS = ('truncate', 'group_bound', 'slack')
OPTION_KEYS = INT_OPTIONS + ('ambient',)

# (文本, 行号, 列偏移)
Located = Tuple[str, int, int]


@dataclass
class GeneratorSpec:
    name: str
    images: Dict[str, Located]


@dataclass
class DeformSpec:
    order: int
    polynomials: List[Located]


@dataclass
class ProblemFile:
    field_spec: str
    field: Field
    variables: List[str]
    ring: PolynomialRing
    ideal: List[Polynomial] = dc_field(default_factory=list)
    generators: List[GeneratorSpec] = dc_field(default_factory=list)
    options: Dict[str, object] = dc_field(default_factory=dict)
    deformations: List[DeformSpec] = dc_field(default_factory=list)
    source: Optional[str] = None

    def option(self, key: str, default=None):
        return self.options.get(key, default)

    def substitutions(self) -> List[Substitution]:
        subs = []
        for gen in self.generators:
            mapping = {var: _poly(text, self.ring, line, col) for var, (text, line, col) in gen.images.items()}
            subs.append(Substitution.from_mapping(self.ring, mapping, gen.name))
        return subs

    def presentation(self) -> AffinePresentation:
        return build_presentation(self.ring, self.ideal)

    def group(self, bound: int = None) -> GroupAction:
        subs = self.substitutions()
        if not subs:
            return trivial_group(self.ring)
        return close_group(subs, bound if bound is not None else self.option('group_bound'))

    def deformation_polynomials(self, ring: PolynomialRing, index: int = 0) -> Tuple[int, List[Polynomial]]:
        """在给定的 (含 eps 的) 上下文中解析第 index 个 deform 行"""
        if index >= len(self.deformations):
            raise InputError("problem file has no 'deform' line")
        spec = self.deformations[index]
        return spec.order, [_poly(text, ring, line, col) for text, line, col in spec.polynomials]

    def render(self) -> str:
        """规范形式, 可再次解析"""
        lines = [f"field {self.field_spec}", "vars " + " ".join(self.variables)]
        lines.append("ideal: " + "; ".join(str(f) for f in self.ideal) if self.ideal else "ideal:")
        for gen, sub in zip(self.generators, self.substitutions()):
            moved = [f"{name} -> {img}" for name, img in zip(self.ring.names, sub.images)
                     if img != self.ring.gen(name)]
            lines.append(f"gen {gen.name}: " + ", ".join(moved) if moved else f"gen {gen.name}:")
        for key in sorted(self.options):
            lines.append(f"option {key} = {self.options[key]}")
        for spec in self.deformations:
            lines.append(f"deform {spec.order}: " + "; ".join(text.strip() for text, _, _ in spec.polynomials))
        return "\n".join(lines) + "\n"

    def base_form(self) -> str:
        """去掉 deform 行的规范形式, 用于比较两个文件是否描述同一问题"""
        return "\n".join(l for l in self.render().splitlines() if not l.startswith("deform "))


def _poly(text: str, ring: PolynomialRing, line: int, offset: int) -> Polynomial:
    try:
        return parse_polynomial(text, ring, line=line)
    except ProblemSyntaxError as error:
        raise ProblemSyntaxError(error.reason, line, error.column + offset)


def _split(body: str, sep: str, offset: int) -> List[Tuple[str, int]]:
    """按分隔符切分, 同时保留每段的列偏移"""
    parts = []
    start = 0
    for piece in body.split(sep):
        lead = len(piece) - len(piece.lstrip())
        parts.append((piece.strip(), offset + start + lead))
        start += len(piece) + len(sep)
    return parts


def parse(text: str, source: str = None) -> ProblemFile:
    """解析问题文件, 出错时给出行列位置"""
    field_spec = None
    field = None
    variables = None
    ring = None
    ideal: List[Polynomial] = []
    generators: List[GeneratorSpec] = []
    options: Dict[str, object] = {}
    deformations: List[DeformSpec] = []
    seen_ideal = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        keyword = stripped.split(None, 1)[0].rstrip(':')

        if keyword == 'field':
            if field is not None:
                raise ProblemSyntaxError("field declared twice", lineno, indent + 1)
            field_spec = " ".join(stripped.split()[1:])
            parts = field_spec.split()
            if len(parts) == 2 and parts[0] == 'F' and not parts[1].isdigit():
                raise ProblemSyntaxError(f"invalid characteristic '{parts[1]}'", lineno, indent + 9)
            try:
                field = field_from_spec(field_spec)
            except ProblemSyntaxError:
                raise
            except InputError as error:
                raise ProblemSyntaxError(error.message, lineno, indent + 7)
            continue

        if field is None:
            raise ProblemSyntaxError("'field' must be the first declaration", lineno, indent + 1)

        if keyword == 'vars':
            if variables is not None:
                raise ProblemSyntaxError("vars declared twice", lineno, indent + 1)
            names = stripped[4:].replace(',', ' ').split()
            if not names:
                raise ProblemSyntaxError("vars needs at least one variable", lineno, indent + 5)
            for name in names:
                if not IDENT.match(name):
                    raise ProblemSyntaxError(f"invalid variable name '{name}'", lineno, line.index(name) + 1)
            ring = PolynomialRing(field, names)
            variables = names
            continue

        if ring is None:
            raise ProblemSyntaxError("'vars' must precede this line", lineno, indent + 1)

        if keyword == 'ideal':
            if seen_ideal:
                raise ProblemSyntaxError("ideal declared twice", lineno, indent + 1)
            seen_ideal = True
            colon = line.find(':')
            if colon < 0:
                raise ProblemSyntaxError("expected ':' after 'ideal'", lineno, indent + 6)
            body = line[colon + 1:]
            if body.strip():
                for piece, col in _split(body, ';', colon + 1):
                    if not piece:
                        raise ProblemSyntaxError("empty polynomial", lineno, col + 1)
                    ideal.append(_poly(piece, ring, lineno, col))
            continue

        if keyword == 'gen':
            colon = line.find(':')
            if colon < 0:
                raise ProblemSyntaxError("expected ':' after generator name", lineno, len(line) + 1)
            name = line[indent + 3:colon].strip()
            if not IDENT.match(name):
                raise ProblemSyntaxError(f"invalid generator name '{name}'", lineno, indent + 5)
            images: Dict[str, Located] = {}
            body = line[colon + 1:]
            if body.strip():
                for piece, col in _split(body, ',', colon + 1):
                    if '->' not in piece:
                        raise ProblemSyntaxError("expected '<var> -> <poly>'", lineno, col + 1)
                    var, image = piece.split('->', 1)
                    var = var.strip()
                    if var not in ring.names:
                        raise ProblemSyntaxError(f"unknown variable '{var}'", lineno, col + 1)
                    if var in images:
                        raise ProblemSyntaxError(f"variable '{var}' mapped twice", lineno, col + 1)
                    image_col = col + piece.index('->') + 2
                    image_col += len(image) - len(image.lstrip())
                    _poly(image.strip(), ring, lineno, image_col)
                    images[var] = (image.strip(), lineno, image_col)
            generators.append(GeneratorSpec(name, images))
            continue

        if keyword == 'option':
            m = re.match(r"\s*option\s+([A-Za-z_]+)\s*=\s*(\S+)\s*$", line)
            if not m:
                raise ProblemSyntaxError("expected 'option <key> = <value>'", lineno, indent + 1)
            key, value = m.group(1), m.group(2)
            if key not in OPTION_KEYS:
                raise ProblemSyntaxError(f"unknown option '{key}'", lineno, m.start(1) + 1)
            if key in INT_OPTIONS:
                if not value.isdigit():
                    raise ProblemSyntaxError(f"option '{key}' needs a non-negative integer", lineno, m.start(2) + 1)
                options[key] = int(value)
            else:
                if value not in AMBIENT_PATHS:
                    raise ProblemSyntaxError(f"unknown ambient path '{value}'", lineno, m.start(2) + 1)
                options[key] = value
            continue

        if keyword == 'deform':
            m = re.match(r"\s*deform\s+(\d+)\s*:", line)
            if not m:
                raise ProblemSyntaxError("expected 'deform <order>: <poly>; ...'", lineno, indent + 1)
            pieces = _split(line[m.end():], ';', m.end())
            deformations.append(DeformSpec(int(m.group(1)), [(p, lineno, c) for p, c in pieces]))
            continue

        raise ProblemSyntaxError(f"unknown declaration '{keyword}'", lineno, indent + 1)

    if field is None:
        raise ProblemSyntaxError("missing 'field' declaration", 0, 0)
    if ring is None:
        raise ProblemSyntaxError("missing 'vars' declaration", 0, 0)
    logger.debug(f"parsed problem with {len(ideal)} equations and {len(generators)} group generators")
    return ProblemFile(field_spec, field, variables, ring, ideal, generators, options, deformations, source)


def load(path) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as error:
        raise InputError(f"cannot read problem file {path}: {error}")
    return parse(text, str(path))
