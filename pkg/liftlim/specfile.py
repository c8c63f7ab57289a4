"""Reader for tower spec files.

A spec file is a sequence of sections, each headed by a bracketed line::

    [group Z]
    kind = abelian
    generators = a

    [hom triple: Z -> Z]
    a -> a^3

    [tower]
    tail: group=Z bonding=id thread_step=triple thread0=a

    [base]
    group = Z
    tail: map=id

Names must be defined before they are used. ``id`` always denotes the
identity of the group it is used on. ``#`` starts a comment. A ``[map]``
section is only read when the file is parsed as the target of a lift.
"""

import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .config import Settings
from .errors import AlphabetMismatch, InvalidHomomorphism, ParseError, SpecReferenceError, UnsupportedBackend
from .groups import AbelianGroup, StageGroup, make_group
from .tower import BaseModel, InverseSystem, LevelMap, StationaryTail, Thread, ThreadComponent, Tower
from .validators import ValidationError, validate_identifier
from .words import IDENTIFIER, Alphabet, GroupHom, Word, format_word, parse_word, parse_words

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"^\[\s*(?P<kind>[a-z]+)(?:\s+(?P<rest>[^\]]*?))?\s*\]\s*$")
_HOM_HEADER = re.compile(r"^(?P<name>\w+)\s*:\s*(?P<src>\w+)\s*->\s*(?P<dst>\w+)$")
_ASSIGN = re.compile(r"^(?P<key>\w+)\s*=\s*(?P<value>.*)$")
_LABELLED = re.compile(r"^(?P<label>[a-z_]+)(?:\s+(?P<index>\d+))?\s*:\s*(?P<body>.*)$")
_FIELD = re.compile(r"(\w+)\s*=")

SECTIONS = ("group", "hom", "tower", "base", "thread", "map", "defaults")


@dataclass
class _Line:
    number: int
    text: str
    indent: int


@dataclass
class _Section:
    kind: str
    rest: str
    line: int
    body: List[_Line] = field(default_factory=list)


@dataclass
class HomEntry:
    source: str
    target: str
    hom: GroupHom


@dataclass
class SpecDocument:
    """A parsed spec file with every name resolved."""

    groups: Dict[str, StageGroup]
    homs: Dict[str, HomEntry]
    tower: Tower
    model: Optional[BaseModel] = None
    threads: Dict[str, Thread] = field(default_factory=dict)
    level_map: Optional[LevelMap] = None
    settings: Settings = field(default_factory=Settings)
    source: str = ""
    unverified: Tuple[str, ...] = ()


def _strip_comment(text: str) -> str:
    at = text.find("#")
    return text if at < 0 else text[:at]


def _sections(text: str) -> List[_Section]:
    sections: List[_Section] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip())
        if stripped.startswith("["):
            match = _HEADER.match(stripped)
            if not match or match.group("kind") not in SECTIONS:
                raise ParseError(f"malformed section header '{stripped}'", number, indent + 1)
            sections.append(_Section(match.group("kind"), (match.group("rest") or "").strip(), number))
            continue
        if not sections:
            raise ParseError("content before the first section", number, indent + 1)
        sections[-1].body.append(_Line(number, stripped, indent))
    return sections


def _fields(line: _Line, body: str, offset: int) -> Dict[str, Tuple[str, int]]:
    """``key=value`` pairs of a tower line, each value with its 0-based column."""
    matches = list(_FIELD.finditer(body))
    if body.strip() and (not matches or body[:matches[0].start()].strip()):
        raise ParseError("expected key=value fields", line.number, line.indent + offset + 1)
    result: Dict[str, Tuple[str, int]] = {}
    for n, match in enumerate(matches):
        end = matches[n + 1].start() if n + 1 < len(matches) else len(body)
        raw = body[match.end():end]
        value = raw.strip()
        start = match.end() + (len(raw) - len(raw.lstrip()))
        key = match.group(1)
        if key in result:
            raise ParseError(f"duplicate field '{key}'", line.number, line.indent + offset + match.start() + 1)
        result[key] = (value, line.indent + offset + start)
    return result


class _Reader:
    def __init__(self, settings: Settings, context: Optional[SpecDocument]):
        self.settings = settings
        self.context = context
        self.groups: Dict[str, StageGroup] = {}
        self.homs: Dict[str, HomEntry] = {}
        self.tower: Optional[Tower] = None
        self.model: Optional[BaseModel] = None
        self.threads: Dict[str, Thread] = {}
        self.level_map: Optional[LevelMap] = None
        self.unverified: List[str] = []

    # -- lookups ----------------------------------------------------------

    def group(self, name: str, line: int) -> StageGroup:
        if name in self.groups:
            return self.groups[name]
        if self.context is not None and name in self.context.groups:
            return self.context.groups[name]
        raise SpecReferenceError(name, line)

    def hom(self, name: str, source: StageGroup, target: StageGroup, line: int, column: int) -> GroupHom:
        if name == "id":
            if source.alphabet != target.alphabet:
                raise ParseError(f"'id' cannot map {source.label} to {target.label}", line, column + 1)
            return GroupHom.identity(source.alphabet)
        entry = self.homs.get(name)
        if entry is None and self.context is not None:
            entry = self.context.homs.get(name)
        if entry is None:
            raise SpecReferenceError(name, line)
        h = entry.hom
        if h.source != source.alphabet or h.target != target.alphabet:
            raise ParseError(
                f"hom '{name}' goes {entry.source} -> {entry.target}, needed {source.label} -> {target.label}",
                line, column + 1,
            )
        return h

    def words(self, group: StageGroup, value: str, line: int, column: int) -> List[Word]:
        return parse_words(value, group.alphabet, line, column)

    def require_tower(self, section: _Section) -> Tower:
        if self.tower is None:
            raise SpecReferenceError("tower", section.line)
        return self.tower

    # -- sections ---------------------------------------------------------

    def read_defaults(self, section: _Section) -> None:
        changes = {}
        keys = {"horizon": "default_horizon", "max_cosets": "max_cosets", "max_deductions": "max_deductions"}
        for line in section.body:
            match = _ASSIGN.match(line.text)
            if not match or match.group("key") not in keys:
                raise ParseError(f"expected one of {', '.join(keys)} = <integer>", line.number, line.indent + 1)
            value = match.group("value").strip()
            if not value.isdigit() or int(value) <= 0:
                raise ParseError(f"{match.group('key')} must be a positive integer", line.number,
                                 line.indent + match.start("value") + 1)
            changes[keys[match.group("key")]] = int(value)
        self.settings = self.settings.model_copy(update=changes)

    def read_group(self, section: _Section) -> None:
        name = section.rest
        _identifier(name, section.line)
        if name == "id":
            raise ParseError("'id' is reserved", section.line, 1)
        if name in self.groups:
            raise ParseError(f"group '{name}' defined twice", section.line, 1)
        values: Dict[str, _Line] = {}
        for line in section.body:
            match = _ASSIGN.match(line.text)
            if not match or match.group("key") not in ("kind", "generators", "relators"):
                raise ParseError("expected kind, generators or relators = ...", line.number, line.indent + 1)
            values[match.group("key")] = line
        if "generators" not in values:
            raise ParseError(f"group '{name}' lists no generators", section.line, 1)
        gens_line = values["generators"]
        gens_value = _ASSIGN.match(gens_line.text).group("value")
        names = tuple(g.strip() for g in gens_value.split(",") if g.strip())
        for g in names:
            if not IDENTIFIER.fullmatch(g):
                raise ParseError(f"invalid generator name '{g}'", gens_line.number,
                                 gens_line.indent + gens_line.text.find(g) + 1)
        try:
            alphabet = Alphabet(names)
        except ValueError as e:
            raise ParseError(str(e), gens_line.number, gens_line.indent + 1) from None
        relators: List[Word] = []
        if "relators" in values:
            line = values["relators"]
            match = _ASSIGN.match(line.text)
            relators = parse_words(match.group("value"), alphabet, line.number, line.indent + match.start("value"))
        kind = "fp" if relators else "free"
        if "kind" in values:
            kind = _ASSIGN.match(values["kind"].text).group("value").strip()
        try:
            self.groups[name] = make_group(kind, alphabet, relators, name, self.settings.budget())
        except ValueError as e:
            line = values.get("kind", section.body[0] if section.body else None)
            raise ParseError(str(e), line.number if line else section.line, 1) from None
        logger.debug("group %s: %s over %s", name, kind, alphabet)

    def read_hom(self, section: _Section) -> None:
        match = _HOM_HEADER.match(section.rest)
        if not match:
            raise ParseError("expected [hom <name>: <source> -> <target>]", section.line, 1)
        name = match.group("name")
        if name == "id" or name in self.homs:
            raise ParseError(f"hom name '{name}' is reserved or already defined", section.line, 1)
        source = self.group(match.group("src"), section.line)
        target = self.group(match.group("dst"), section.line)
        mapping: Dict[str, Word] = {}
        for line in section.body:
            parts = line.text.split("->")
            if len(parts) != 2:
                raise ParseError("expected '<generator> -> <word>'", line.number, line.indent + 1)
            gen = parts[0].strip()
            if gen not in source.alphabet.names:
                raise ParseError(f"'{gen}' is not a generator of {match.group('src')}", line.number, line.indent + 1)
            if gen in mapping:
                raise ParseError(f"generator '{gen}' mapped twice", line.number, line.indent + 1)
            mapping[gen] = parse_word(parts[1], target.alphabet, line.number, line.indent + len(parts[0]) + 2)
        h = GroupHom.from_mapping(source.alphabet, target.alphabet, mapping)
        unchecked = _check_relations(source, target, h)
        if unchecked:
            note = f"hom {name}: relators {', '.join(unchecked)} not checked in {match.group('dst')}"
            logger.warning("%s (word problem undecided)", note)
            self.unverified.append(note)
        self.homs[name] = HomEntry(match.group("src"), match.group("dst"), h)

    def read_tower(self, section: _Section) -> None:
        if self.tower is not None:
            raise ParseError("a spec file has exactly one [tower] section", section.line, 1)
        groups: List[StageGroup] = []
        entries: List = []
        bonding_lines: Dict[int, Tuple[str, _Line, int]] = {}
        tail_line: Optional[_Line] = None
        tail_fields: Dict[str, Tuple[str, int]] = {}
        extra: List[Tuple[_Line, Dict[str, Tuple[str, int]]]] = []
        for line in section.body:
            match = _LABELLED.match(line.text)
            if not match:
                raise ParseError("expected 'stage <i>:', 'bonding <i>:', 'tail:' or 'component:'",
                                 line.number, line.indent + 1)
            label, index, body = match.group("label"), match.group("index"), match.group("body")
            offset = match.start("body")
            if label == "stage" and index is not None:
                if int(index) != len(groups):
                    raise ParseError(f"expected stage {len(groups)}, got stage {index}", line.number, line.indent + 1)
                fields = _fields(line, body, offset)
                group = self.group(_required(fields, "group", line), line.number)
                value, column = fields.get("thread", ("", line.indent + len(line.text)))
                groups.append(group)
                entries.append(group.subgroup(self.words(group, value, line.number, column)))
            elif label == "bonding" and index is not None:
                bonding_lines[int(index)] = (body.strip(), line, line.indent + offset)
            elif label == "tail" and index is None:
                if tail_line is not None:
                    raise ParseError("tail given twice", line.number, line.indent + 1)
                tail_line, tail_fields = line, _fields(line, body, offset)
            elif label == "component" and index is None:
                extra.append((line, _fields(line, body, offset)))
            else:
                raise ParseError(f"unexpected '{label}' line", line.number, line.indent + 1)

        bondings = []
        for i in range(len(groups) - 1):
            if i not in bonding_lines:
                raise ParseError(f"missing bonding {i}", section.line, 1)
            name, line, column = bonding_lines.pop(i)
            bondings.append(self.hom(name, groups[i + 1], groups[i], line.number, column))
        if bonding_lines:
            i = min(bonding_lines)
            raise ParseError(f"bonding {i} has no stage {i + 1}", bonding_lines[i][1].number, 1)

        tail = None
        components: List[ThreadComponent] = []
        if tail_line is not None:
            T = self.group(_required(tail_fields, "group", tail_line), tail_line.number)
            b_name, b_col = tail_fields.get("bonding", ("id", 0))
            bonding = self.hom(b_name, T, T, tail_line.number, b_col)
            connector = None
            if groups:
                c_name, c_col = tail_fields.get("connector", ("id", 0))
                connector = self.hom(c_name, T, groups[-1], tail_line.number, c_col)
            tail = StationaryTail(T, bonding, connector)
            components.append(self.component(T, tail_line, tail_fields, "thread_step", "thread0"))
            for line, fields in extra:
                components.append(self.component(T, line, fields, "step", "seed"))
        elif extra:
            raise ParseError("'component' lines need a tail", extra[0][0].number, 1)
        try:
            system = InverseSystem(tuple(groups), tuple(bondings), tail)
            self.tower = Tower(system, Thread(tuple(entries), tuple(components)),
                               self.settings.default_horizon, name="")
        except (ValueError, AlphabetMismatch) as e:
            raise ParseError(str(e), section.line, 1) from None

    def component(self, T: StageGroup, line: _Line, fields: Dict[str, Tuple[str, int]],
                  step_key: str, seed_key: str) -> ThreadComponent:
        step_name, step_col = fields.get(step_key, ("id", 0))
        step = self.hom(step_name, T, T, line.number, step_col)
        value, column = fields.get(seed_key, ("", 0))
        return ThreadComponent(T.subgroup(self.words(T, value, line.number, column)), step)

    def read_base(self, section: _Section) -> None:
        t = self.require_tower(section)
        P: Optional[StageGroup] = None
        maps: Dict[int, GroupHom] = {}
        tail_map = lift = None
        for line in section.body:
            assign = _ASSIGN.match(line.text)
            if assign and assign.group("key") == "group":
                P = self.group(assign.group("value").strip(), line.number)
                continue
            match = _LABELLED.match(line.text)
            if P is None:
                raise ParseError("the base section starts with 'group = <name>'", line.number, line.indent + 1)
            if match and match.group("label") == "stage" and match.group("index") is not None:
                i = int(match.group("index"))
                if i >= t.system.prefix_length:
                    raise ParseError(f"no prefix stage {i}", line.number, line.indent + 1)
                maps[i] = self.hom(match.group("body").strip(), P, t.group(i), line.number,
                                   line.indent + match.start("body"))
            elif match and match.group("label") == "tail" and t.system.tail is not None:
                fields = _fields(line, match.group("body"), match.start("body"))
                T = t.system.tail.group
                name, column = fields.get("map", ("id", 0))
                tail_map = self.hom(name, P, T, line.number, column)
                if "lift" in fields:
                    lift = self.hom(fields["lift"][0], T, T, line.number, fields["lift"][1])
            else:
                raise ParseError("expected 'stage <i>: <hom>' or 'tail: map=<hom> lift=<hom>'",
                                 line.number, line.indent + 1)
        if P is None:
            raise ParseError("the base section names no group", section.line, 1)
        missing = [i for i in range(t.system.prefix_length) if i not in maps]
        if missing or (t.system.tail is not None and tail_map is None):
            what = f"stage {missing[0]}" if missing else "the tail"
            raise ParseError(f"the base model has no map to {what}", section.line, 1)
        self.model = BaseModel(P, tuple(maps[i] for i in range(len(maps))), tail_map, lift)

    def read_thread(self, section: _Section) -> None:
        t = self.require_tower(section)
        name = section.rest
        _identifier(name, section.line)
        if name in self.threads:
            raise ParseError(f"thread '{name}' defined twice", section.line, 1)
        entries: Dict[int, object] = {}
        components: List[ThreadComponent] = []
        for line in section.body:
            match = _LABELLED.match(line.text)
            if match and match.group("label") == "stage" and match.group("index") is not None:
                i = int(match.group("index"))
                if i >= t.system.prefix_length:
                    raise ParseError(f"no prefix stage {i}", line.number, line.indent + 1)
                group = t.group(i)
                entries[i] = group.subgroup(self.words(group, match.group("body"), line.number,
                                                       line.indent + match.start("body")))
            elif match and match.group("label") in ("tail", "component") and t.system.tail is not None:
                fields = _fields(line, match.group("body"), match.start("body"))
                components.append(self.component(t.system.tail.group, line, fields, "step", "seed"))
            else:
                raise ParseError("expected 'stage <i>: <words>' or 'tail: step=<hom> seed=<words>'",
                                 line.number, line.indent + 1)
        missing = [i for i in range(t.system.prefix_length) if i not in entries]
        if missing:
            raise ParseError(f"thread '{name}' has no entry for stage {missing[0]}", section.line, 1)
        if t.system.tail is not None and not components:
            raise ParseError(f"thread '{name}' needs a tail line", section.line, 1)
        self.threads[name] = Thread(tuple(entries[i] for i in range(len(entries))), tuple(components))

    def read_map(self, section: _Section) -> None:
        dst = self.require_tower(section)
        if self.context is None:
            # only meaningful when this file is the target of a lift
            logger.debug("[map] at line %d skipped without a source spec", section.line)
            return
        src = self.context.tower
        shift = 0
        maps: Dict[int, GroupHom] = {}
        tail_map = None
        pending: List[Tuple[str, Optional[int], str, _Line, int]] = []
        for line in section.body:
            assign = _ASSIGN.match(line.text)
            if assign and assign.group("key") == "shift":
                value = assign.group("value").strip()
                if not value.isdigit():
                    raise ParseError("shift must be a natural number", line.number, line.indent + 1)
                shift = int(value)
                continue
            match = _LABELLED.match(line.text)
            if not match or match.group("label") not in ("stage", "tail"):
                raise ParseError("expected 'shift = <n>', 'stage <i>: <hom>' or 'tail: <hom>'",
                                 line.number, line.indent + 1)
            index = match.group("index")
            pending.append((match.group("label"), int(index) if index is not None else None,
                            match.group("body").strip(), line, line.indent + match.start("body")))
        for label, i, name, line, column in pending:
            if label == "stage":
                if i >= dst.system.prefix_length:
                    raise ParseError(f"no target stage {i}", line.number, line.indent + 1)
                maps[i] = self.hom(name, src.group(i + shift), dst.group(i), line.number, column)
            elif dst.system.tail is not None and src.system.tail is not None:
                tail_map = self.hom(name, src.system.tail.group, dst.system.tail.group, line.number, column)
            else:
                raise ParseError("a tail map needs tails on both towers", line.number, line.indent + 1)
        missing = [i for i in range(dst.system.prefix_length) if i not in maps]
        if missing:
            raise ParseError(f"the level map has no component at stage {missing[0]}", section.line, 1)
        self.level_map = LevelMap(tuple(maps[i] for i in range(len(maps))), tail_map, shift)


def _identifier(name: str, line: int) -> None:
    try:
        validate_identifier(name)
    except ValidationError as e:
        raise ParseError(str(e), line, 1) from None


def _required(fields: Dict[str, Tuple[str, int]], key: str, line: _Line) -> str:
    if key not in fields or not fields[key][0]:
        raise ParseError(f"missing field '{key}'", line.number, line.indent + 1)
    return fields[key][0]


def _check_relations(source: StageGroup, target: StageGroup, h: GroupHom) -> List[str]:
    """Relators of the source, and commutators for abelian sources, must die in the target.

    Returns:
        Relations whose images the target cannot decide (infinite presented
        targets); the hom is kept and these are reported as unverified

    Raises:
        InvalidHomomorphism: With the first offending relation
    """
    relations: List[Word] = list(getattr(getattr(source, "presentation", None), "relators", ()))
    if isinstance(source, AbelianGroup) and not isinstance(target, AbelianGroup):
        gens = [Word.generator(source.alphabet, i) for i in range(len(source.alphabet))]
        relations += [a.commutator(b) for n, a in enumerate(gens) for b in gens[n + 1:]]
    unchecked: List[str] = []
    for r in relations:
        try:
            trivial = target.is_trivial(h(r))
        except UnsupportedBackend:
            unchecked.append(format_word(r))
            continue
        if not trivial:
            raise InvalidHomomorphism(format_word(r))
    return unchecked


def parse_spec(source: Union[str, os.PathLike], settings: Optional[Settings] = None,
               context: Optional[SpecDocument] = None, max_cosets: Optional[int] = None) -> SpecDocument:
    """Parse a spec file.

    Args:
        source: Spec text, or a path to read it from
        settings: Settings the file's ``[defaults]`` start from
        context: Already parsed source document whose names stay visible
            (target files of ``lift``)
        max_cosets: Coset budget that wins over ``[defaults]``

    Returns:
        The document; coherence of the thread is not checked here

    Raises:
        ParseError: On malformed text, with line and column
        SpecReferenceError: On a name used before its definition
        InvalidHomomorphism: When a hom breaks a relator
        OSError: When the file cannot be read
    """
    origin = ""
    if isinstance(source, os.PathLike):
        origin = str(source)
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    sections = _sections(text)
    reader = _Reader(settings or Settings(), context)
    for section in sections:
        if section.kind == "defaults":
            reader.read_defaults(section)
    reader.settings = reader.settings.override(max_cosets=max_cosets)
    for section in sections:
        if section.kind != "defaults":
            getattr(reader, f"read_{section.kind}")(section)
    if reader.tower is None:
        raise ParseError("no [tower] section", len(text.splitlines()) or 1, 1)
    return SpecDocument(
        groups=reader.groups,
        homs=reader.homs,
        tower=reader.tower,
        model=reader.model,
        threads=reader.threads,
        level_map=reader.level_map,
        settings=reader.settings,
        source=origin,
        unverified=tuple(reader.unverified),
    )


def load_spec(path: Union[str, os.PathLike], **kwargs) -> SpecDocument:
    return parse_spec(Path(path), **kwargs)
