"""
Text formats for set systems and MobileVaccClinic instances.

Set-system format::

    # comment
    n m
    0: 0 1
    1: 1 2

Sets that never appear are empty. Vacc-instance format::

    P L
    k 2                 # optional
    rho 0.9             # optional
    loc a 0.0 0.0       # planar (or "loc a 0.0" on the line)
    person p0: a b

or, for an explicit metric, "dist a b 0.5" triples (locations appear in order of
first mention, or may be declared with a bare "loc a"). Everything after '#' is
ignored; tokens are whitespace separated; input is UTF-8.
"""

import io
from pathlib import Path

import numpy as np

from core.errors import ParseError, ValidationError
from core.set_system import SetSystem
from core.vacc import Metric, VaccInstance


def _read_text(source) -> str:
    if isinstance(source, (str, Path)):
        with open(source, "rb") as f:
            raw = f.read()
    elif isinstance(source, (bytes, bytearray)):
        raw = bytes(source)
    else:
        raw = source.read()
    if isinstance(raw, str):
        return raw
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not valid UTF-8 ({exc})") from None


def _content_lines(source):
    """Yield (line_number, tokens) for every non-blank line, comments stripped."""
    for number, line in enumerate(_read_text(source).splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield number, line


def _parse_int(token: str, number: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {token!r}", number) from None


def _parse_float(token: str, number: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"expected number {what}, got {token!r}", number) from None


def _parse_header(lines, kind: str):
    try:
        number, line = next(lines)
    except StopIteration:
        raise ParseError(f"empty {kind} input: missing header line") from None
    tokens = line.split()
    if len(tokens) != 2:
        raise ParseError(f"{kind} header must have two integers", number)
    first = _parse_int(tokens[0], number, "count")
    second = _parse_int(tokens[1], number, "count")
    if first < 0 or second < 0:
        raise ParseError("counts must be non-negative", number)
    return first, second


def load_set_system(source) -> SetSystem:
    """
    Parse and validate a set system.

    Args:
        source: path, bytes, or a binary/text stream.

    Raises:
        ParseError: malformed line (carries the line number).
        ValidationError: id out of range, set listed twice, duplicate element.
    """
    lines = _content_lines(source)
    n, m = _parse_header(lines, "set-system")
    sets = [None] * m
    for number, line in lines:
        head, sep, rest = line.partition(":")
        if not sep:
            raise ParseError("expected 'setid: e1 e2 ...'", number)
        set_id = _parse_int(head.strip(), number, "set id")
        if not 0 <= set_id < m:
            raise ValidationError(f"line {number}: set id {set_id} outside [0, {m})")
        if sets[set_id] is not None:
            raise ValidationError(f"line {number}: set {set_id} listed twice")
        members = [_parse_int(tok, number, "element id") for tok in rest.split()]
        seen = set()
        for e in members:
            if not 0 <= e < n:
                raise ValidationError(f"line {number}: element {e} outside [0, {n})")
            if e in seen:
                raise ValidationError(f"line {number}: duplicate element {e} in set {set_id}")
            seen.add(e)
        sets[set_id] = members
    return SetSystem.from_sets(n, [members or [] for members in sets], m=m)


def dump_set_system(system: SetSystem, stream=None, comments=()) -> str:
    """Serialize `system`; returns the text and writes it to `stream` if given."""
    out = io.StringIO()
    for comment in comments:
        out.write(f"# {comment}\n")
    out.write(f"{system.n} {system.m}\n")
    for set_id in range(system.m):
        members = " ".join(str(e) for e in system.members(set_id))
        out.write(f"{set_id}: {members}\n" if members else f"{set_id}:\n")
    text = out.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def load_vacc_instance(source, k: int = None, rho=None) -> VaccInstance:
    """
    Parse a MobileVaccClinic instance.

    `k` and `rho` override the optional directives of the file; without either
    the instance defaults apply (k = 1, rho = 0.8).

    Raises:
        ParseError: malformed line, or point and matrix blocks mixed.
        ValidationError: counts disagree with the header, unknown location label,
            duplicate label, incomplete or invalid metric.
    """
    lines = _content_lines(source)
    n_people, n_locations = _parse_header(lines, "vacc")
    file_k, file_rho = None, None
    location_index = {}
    coordinates = []
    triples = []
    people = []
    person_labels = []

    def declare(label):
        if label not in location_index:
            location_index[label] = len(location_index)
        return location_index[label]

    for number, line in lines:
        keyword, *rest = line.split(None, 1)
        rest = rest[0].strip() if rest else ""
        if keyword == "k":
            file_k = _parse_int(rest, number, "budget k")
        elif keyword == "rho":
            file_rho = _parse_float(rest, number, "rho")
        elif keyword == "loc":
            tokens = rest.split()
            if not tokens or len(tokens) > 3:
                raise ParseError("expected 'loc id [x [y]]'", number)
            label = tokens[0]
            if label in location_index and tokens[1:]:
                raise ValidationError(f"line {number}: location {label!r} declared twice")
            declare(label)
            if tokens[1:]:
                if triples:
                    raise ParseError("point coordinates mixed with a dist block", number)
                xy = [_parse_float(tok, number, "coordinate") for tok in tokens[1:]]
                coordinates.append(xy + [0.0] * (2 - len(xy)))
        elif keyword == "dist":
            tokens = rest.split()
            if len(tokens) != 3:
                raise ParseError("expected 'dist i j value'", number)
            if coordinates:
                raise ParseError("dist triple mixed with point coordinates", number)
            a, b = declare(tokens[0]), declare(tokens[1])
            triples.append((a, b, _parse_float(tokens[2], number, "distance"), number))
        elif keyword == "person":
            head, sep, visits = rest.partition(":")
            label = head.strip()
            if not sep or not label or len(label.split()) != 1:
                raise ParseError("expected 'person id: loc1 loc2 ...'", number)
            visit = []
            for tok in visits.split():
                if tok not in location_index:
                    raise ValidationError(f"line {number}: unknown location {tok!r}")
                visit.append(location_index[tok])
            if not visit:
                raise ValidationError(f"line {number}: person {label!r} has an empty visit-set")
            people.append(visit)
            person_labels.append(label)
        else:
            raise ParseError(f"unknown directive {keyword!r}", number)

    if len(location_index) != n_locations:
        raise ValidationError(f"header declares {n_locations} locations, found {len(location_index)}")
    if len(people) != n_people:
        raise ValidationError(f"header declares {n_people} people, found {len(people)}")
    if len(set(person_labels)) != len(person_labels):
        raise ValidationError("person labels must be unique")

    if coordinates:
        if len(coordinates) != n_locations:
            raise ValidationError("every location needs coordinates in a point block")
        points = np.array(coordinates)
        if np.all(points[:, 1] == 0.0):
            points = points[:, :1]
        metric = Metric.from_points(points)
    else:
        matrix = np.full((n_locations, n_locations), np.nan)
        np.fill_diagonal(matrix, 0.0)
        for a, b, value, number in triples:
            if a == b and value != 0.0:
                raise ValidationError(f"line {number}: non-zero self distance")
            for i, j in ((a, b), (b, a)):
                if not np.isnan(matrix[i, j]) and matrix[i, j] != value and i != j:
                    raise ValidationError(f"line {number}: conflicting distance for pair")
                matrix[i, j] = value
        if np.any(np.isnan(matrix)):
            raise ValidationError("dist block does not cover every pair of locations")
        metric = Metric.from_matrix(matrix)

    labels = sorted(location_index, key=location_index.get)
    return VaccInstance(
        people,
        metric,
        k=k if k is not None else (file_k if file_k is not None else 1),
        rho=rho if rho is not None else (file_rho if file_rho is not None else 0.8),
        location_labels=labels,
        person_labels=person_labels,
    )


def dump_vacc_instance(instance: VaccInstance, stream=None, comments=(), include_params: bool = True) -> str:
    """Serialize `instance` in original units; returns the text."""
    out = io.StringIO()
    for comment in comments:
        out.write(f"# {comment}\n")
    out.write(f"{instance.n_people} {instance.n_locations}\n")
    if include_params:
        out.write(f"k {instance.k}\n")
        out.write(f"rho {instance.rho.rho!r}\n")
    labels = instance.location_labels
    metric = instance.metric
    if metric.points is not None:
        for label, point in zip(labels, metric.points):
            coords = " ".join(repr(float(x)) for x in point)
            out.write(f"loc {label} {coords}\n")
    else:
        for label in labels:
            out.write(f"loc {label}\n")
        original = metric.original_distances()
        for i in range(metric.size):
            for j in range(i + 1, metric.size):
                out.write(f"dist {labels[i]} {labels[j]} {float(original[i, j])!r}\n")
    for label, visit in zip(instance.person_labels, instance.visits):
        out.write(f"person {label}: {' '.join(labels[j] for j in visit)}\n")
    text = out.getvalue()
    if stream is not None:
        stream.write(text)
    return text
