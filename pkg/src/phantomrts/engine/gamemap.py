"""Grid maps and their text format.

First line ``width height``, then ``height`` rows of ``width`` characters:
``.`` empty, ``#`` wall, ``1``-``9`` resource cell holding that digit times 5,
``A``/``a`` player-1 base/worker, ``B``/``b`` player-2 base/worker.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

MAX_SIDE = 64
RESOURCE_UNIT = 5


class MapError(ValueError):
    pass


@dataclass(frozen=True)
class GameMap:
    name: str
    width: int
    height: int
    walls: frozenset[tuple[int, int]]
    resources: dict[tuple[int, int], int]
    bases: tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]
    workers: tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]

    @property
    def surface(self) -> int:
        return self.width * self.height

    def start(self, player: int) -> tuple[int, int]:
        """Start position: the player's first base, else its first worker."""
        cells = self.bases[player] or self.workers[player]
        return cells[0]

    def to_text(self) -> str:
        rows = [["."] * self.width for _ in range(self.height)]
        for x, y in self.walls:
            rows[y][x] = "#"
        for (x, y), amount in self.resources.items():
            rows[y][x] = str(amount // RESOURCE_UNIT)
        for p, (base_ch, worker_ch) in enumerate((("A", "a"), ("B", "b"))):
            for x, y in self.bases[p]:
                rows[y][x] = base_ch
            for x, y in self.workers[p]:
                rows[y][x] = worker_ch
        return f"{self.width} {self.height}\n" + "\n".join("".join(r) for r in rows) + "\n"


def parse_map(text: str, name: str = "map") -> GameMap:
    lines = [ln.rstrip("\r") for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        raise MapError("empty map")
    try:
        width, height = (int(v) for v in lines[0].split())
    except ValueError:
        raise MapError(f"bad header line {lines[0]!r}") from None
    if not (1 <= width <= MAX_SIDE and 1 <= height <= MAX_SIDE):
        raise MapError(f"map size {width}x{height} outside 1..{MAX_SIDE}")
    rows = lines[1:]
    if len(rows) != height or any(len(r) != width for r in rows):
        raise MapError(f"expected {height} rows of width {width}")
    walls, res = set(), {}
    bases, workers = ([], []), ([], [])
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            if ch == ".":
                continue
            if ch == "#":
                walls.add((x, y))
            elif ch in "123456789":
                res[(x, y)] = int(ch) * RESOURCE_UNIT
            elif ch in "Aa":
                (bases if ch == "A" else workers)[0].append((x, y))
            elif ch in "Bb":
                (bases if ch == "B" else workers)[1].append((x, y))
            else:
                raise MapError(f"unknown map character {ch!r} at {(x, y)}")
    for p in (0, 1):
        if not bases[p] and not workers[p]:
            raise MapError(f"player {p + 1} has no start position")
    gm = GameMap(name, width, height, frozenset(walls), res,
                 (tuple(bases[0]), tuple(bases[1])), (tuple(workers[0]), tuple(workers[1])))
    if gm.start(0) == gm.start(1):
        raise MapError("start positions must be distinct")
    return gm


def load_map(path: str | Path) -> GameMap:
    path = Path(path)
    return parse_map(path.read_text(), path.stem)


def builtin_map(name: str) -> GameMap:
    """Load one of the maps shipped in ``phantomrts/data/maps``."""
    fname = name if name.endswith(".txt") else name + ".txt"
    node = resources.files("phantomrts").joinpath("data/maps", fname)
    if not node.is_file():
        raise MapError(f"no built-in map {name!r}")
    return parse_map(node.read_text(), Path(fname).stem)


def resolve_map(spec: str) -> GameMap:
    """A filesystem path, or the name of a built-in map."""
    p = Path(spec)
    if p.is_file():
        return load_map(p)
    return builtin_map(spec)
