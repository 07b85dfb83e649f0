"""Multi-disk string configurations and strand following.

Every tangle operation in the package is expressed as a
:class:`GluingConfig`: a set of input disks with marked points, an optional
output boundary, and a perfect matching ("strings") on all marked points.
Substituting a TL diagram into each disk and following strands through the
union of the two matchings produces an output diagram and a loop count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .diagrams import TLDiagram
from .errors import ValidationError

OUTPUT = None  # disk id reserved for the output boundary

Point = tuple[Hashable, int]


@dataclass(frozen=True)
class Disk:
    id: Hashable
    points: int  # number of marked points, 2k


@dataclass(frozen=True)
class GluingConfig:
    """Disks, strings between marked points, and the output boundary.

    Points are ``(disk_id, i)`` with ``i`` 0-based in clockwise order from the
    disk's first point; output points use the disk id :data:`OUTPUT`.
    ``free_loops`` counts closed strings that touch no disk.
    """

    disks: tuple[Disk, ...]
    strings: tuple[tuple[Point, Point], ...]
    output_points: int = 0
    free_loops: int = 0
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "disks", tuple(self.disks))
        object.__setattr__(self, "strings", tuple((tuple(a), tuple(b)) for a, b in self.strings))
        index = {}
        for d in self.disks:
            if d.id is OUTPUT:
                raise ValidationError("disk id None is reserved for the output boundary")
            if d.id in index:
                raise ValidationError(f"duplicate disk id {d.id!r}")
            if d.points % 2:
                raise ValidationError(f"disk {d.id!r} has an odd number of points")
            index[d.id] = d.points
        if self.output_points % 2:
            raise ValidationError("output boundary has an odd number of points")
        seen = set()
        for a, b in self.strings:
            for p in (a, b):
                did, i = p
                size = self.output_points if did is OUTPUT else index.get(did)
                if size is None:
                    raise ValidationError(f"string endpoint {p!r} refers to an unknown disk")
                if not 0 <= i < size:
                    raise ValidationError(f"string endpoint {p!r} outside disk of {size} points")
                if p in seen:
                    raise ValidationError(f"point {p!r} used by two strings")
                seen.add(p)
        expected = self.output_points + sum(index.values())
        if len(seen) != expected:
            missing = [
                (d.id, i) for d in self.disks for i in range(d.points) if (d.id, i) not in seen
            ] + [(OUTPUT, i) for i in range(self.output_points) if (OUTPUT, i) not in seen]
            raise ValidationError(f"dangling endpoint {missing[0]!r}")
        object.__setattr__(self, "_index", index)

    @property
    def disk_sizes(self) -> dict:
        return dict(self._index)


def union_cycles(outer: Sequence[int], inner: Sequence[int], n_open: int = 0):
    """Follow strands through two matchings on points ``0..n-1``.

    ``outer`` is a perfect matching (list of partners). ``inner`` is a partial
    matching where the first ``n_open`` points are open ends (``inner[i] == -1``).
    Returns ``(open_partner, loops)``: the induced matching on open points and
    the number of closed cycles.
    """
    n = len(outer)
    seen = bytearray(n)
    open_partner = [-1] * n_open
    for s in range(n_open):
        if seen[s]:
            continue
        seen[s] = 1
        x = outer[s]
        while True:
            seen[x] = 1
            if x < n_open:
                break
            y = inner[x]
            seen[y] = 1
            x = outer[y]
        open_partner[s], open_partner[x] = x, s
    loops = 0
    for s in range(n_open, n):
        if seen[s]:
            continue
        loops += 1
        x = s
        while not seen[x]:
            seen[x] = 1
            y = inner[x]
            seen[y] = 1
            x = outer[y]
    return open_partner, loops


def resolve_gluing(config: GluingConfig, contents: Mapping[Hashable, TLDiagram]) -> tuple[TLDiagram, int]:
    """Substitute diagrams into the disks and follow strands.

    Returns the output matching (as a diagram on the output points) and the
    number of closed loops, including the configuration's free loops.
    """
    sizes = config.disk_sizes
    for did, npts in sizes.items():
        if did not in contents:
            raise ValidationError(f"no content given for disk {did!r}")
        if 2 * contents[did].k != npts:
            raise ValidationError(
                f"disk {did!r} has {npts} points but its content has {2 * contents[did].k}"
            )
    # flat numbering: output points first, then disks in declaration order
    offset = {OUTPUT: 0}
    pos = config.output_points
    for d in config.disks:
        offset[d.id] = pos
        pos += d.points
    n = pos
    outer = [-1] * n
    for (da, ia), (db, ib) in config.strings:
        a, b = offset[da] + ia, offset[db] + ib
        outer[a], outer[b] = b, a
    inner = [-1] * n
    for d in config.disks:
        o = offset[d.id]
        for i, j in enumerate(contents[d.id].partner):
            inner[o + i] = o + j
    open_partner, loops = union_cycles(outer, inner, config.output_points)
    return TLDiagram(tuple(open_partner)), loops + config.free_loops
