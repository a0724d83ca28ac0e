"""Toy turtle-graphics environment: loop/move/turn programs on a binary canvas.

Programs are sequences of three primitives. ``Move`` draws a straight stroke
of the given pixel length, ``Turn`` rotates the heading counterclockwise, and
``Loop`` repeats its body. The turtle starts at (64, 64) heading east with
the pen permanently down; drawing clips to the 128x128 canvas. For scoring,
programs are unrolled to flat move/turn lists and compared with the same
clique-style divergence as program DAGs, restricted to order-preserving
matchings because lists are sequenced.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence, Union

import numpy as np

from .divergence import _delta_value
from .errors import (
    CannotSatisfyBoundError,
    DepthExceededError,
    FlatlandFormatError,
    InvalidConfigError,
    TooLargeError,
)
from .flow import FlowNode, FlowProgram, parse_flow, serialize_flow

CANVAS_SIZE = 128
START_X = 64.0
START_Y = 64.0
START_HEADING = 0.0

MAX_LOOP_DEPTH = 4
MAX_FLAT_LENGTH = 4096

#: Tolerance for treating two real-valued primitive parameters as equal.
PARAM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Move:
    """Draw a stroke of ``length`` pixels along the current heading."""

    length: float


@dataclass(frozen=True)
class Turn:
    """Rotate the heading ``angle`` degrees counterclockwise."""

    angle: float


@dataclass(frozen=True)
class Loop:
    """Repeat ``body`` ``count`` times; count must be a positive integer."""

    count: int
    body: tuple["Primitive", ...]

    def __post_init__(self) -> None:
        if not isinstance(self.count, int) or isinstance(self.count, bool) or self.count < 1:
            raise InvalidConfigError(f"loop count must be a positive integer, got {self.count}")


Primitive = Union[Move, Turn, Loop]


@dataclass(frozen=True)
class FlatlandProgram:
    """An ordered sequence of primitives."""

    items: tuple[Primitive, ...] = ()


def _check_depth(items: Sequence[Primitive], depth: int = 1) -> None:
    for item in items:
        if isinstance(item, Loop):
            if depth > MAX_LOOP_DEPTH:
                raise DepthExceededError(
                    f"loop nesting exceeds the supported depth of {MAX_LOOP_DEPTH}"
                )
            _check_depth(item.body, depth + 1)


def flatten(program: FlatlandProgram) -> list[Primitive]:
    """Unroll all loops in order; only Move and Turn remain."""
    _check_depth(program.items)
    out: list[Primitive] = []

    def unroll(items: Sequence[Primitive]) -> None:
        for item in items:
            if isinstance(item, Loop):
                for _ in range(item.count):
                    unroll(item.body)
            else:
                out.append(item)
            if len(out) > MAX_FLAT_LENGTH:
                raise TooLargeError(
                    f"flattened program exceeds {MAX_FLAT_LENGTH} primitives"
                )

    unroll(program.items)
    return out


@dataclass(eq=False, frozen=True)
class Canvas:
    """A 128x128 binary image."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        if self.bits.shape != (CANVAS_SIZE, CANVAS_SIZE):
            raise ValueError(f"canvas must be {CANVAS_SIZE}x{CANVAS_SIZE}, got {self.bits.shape}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Canvas):
            return NotImplemented
        return bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def sha256(self) -> str:
        return hashlib.sha256(self.bits.tobytes()).hexdigest()

    def to_pbm_bytes(self) -> bytes:
        header = f"P4\n{CANVAS_SIZE} {CANVAS_SIZE}\n".encode("ascii")
        return header + np.packbits(self.bits, axis=1).tobytes()

    def to_rle_text(self) -> str:
        """Run-length text: canvas size, then 'row: col+len ...' for inked rows."""
        lines = [f"{CANVAS_SIZE} {CANVAS_SIZE}"]
        for r in range(CANVAS_SIZE):
            row = self.bits[r]
            if not row.any():
                continue
            runs = []
            c = 0
            while c < CANVAS_SIZE:
                if row[c]:
                    start = c
                    while c < CANVAS_SIZE and row[c]:
                        c += 1
                    runs.append(f"{start}+{c - start}")
                else:
                    c += 1
            lines.append(f"{r}: {' '.join(runs)}")
        return "\n".join(lines) + "\n"


@dataclass
class TurtleState:
    """Pen position in pixels, heading in degrees counterclockwise from east."""

    x: float = START_X
    y: float = START_Y
    heading: float = START_HEADING


def _cos_deg(deg: float) -> float:
    d = deg % 360.0
    if d == 0.0:
        return 1.0
    if d == 90.0 or d == 270.0:
        return 0.0
    if d == 180.0:
        return -1.0
    return math.cos(math.radians(d))


def _sin_deg(deg: float) -> float:
    d = deg % 360.0
    if d == 0.0 or d == 180.0:
        return 0.0
    if d == 90.0:
        return 1.0
    if d == 270.0:
        return -1.0
    return math.sin(math.radians(d))


def _px(v: float) -> int:
    return int(math.floor(v + 0.5))


def _line_pixels(bits: np.ndarray, r0: int, c0: int, r1: int, c1: int) -> None:
    """Integer line rasterization, both endpoints inclusive, clipped to bounds."""
    dc = abs(c1 - c0)
    dr = -abs(r1 - r0)
    sc = 1 if c0 < c1 else -1
    sr = 1 if r0 < r1 else -1
    err = dc + dr
    while True:
        if 0 <= r0 < CANVAS_SIZE and 0 <= c0 < CANVAS_SIZE:
            bits[r0, c0] = 1
        if r0 == r1 and c0 == c1:
            return
        e2 = 2 * err
        if e2 >= dr:
            err += dr
            c0 += sc
        if e2 <= dc:
            err += dc
            r0 += sr

def render_with_state(program: FlatlandProgram) -> tuple[Canvas, TurtleState]:
    """Rasterize the program and return the canvas plus the final turtle pose.

    Rows grow downward, so a counterclockwise turn from east heads toward
    smaller row indices. The pen tracks exact float coordinates; each stroke
    draws between the rounded endpoints.
    """
    _check_depth(program.items)
    bits = np.zeros((CANVAS_SIZE, CANVAS_SIZE), dtype=np.uint8)
    state = TurtleState()

    def run(items: Sequence[Primitive]) -> None:
        for item in items:
            if isinstance(item, Move):
                x2 = state.x + item.length * _cos_deg(state.heading)
                y2 = state.y - item.length * _sin_deg(state.heading)
                _line_pixels(bits, _px(state.y), _px(state.x), _px(y2), _px(x2))
                state.x, state.y = x2, y2
            elif isinstance(item, Turn):
                state.heading = (state.heading + item.angle) % 360.0
            else:
                for _ in range(item.count):
                    run(item.body)

    run(program.items)
    return Canvas(bits=bits), state


def render(program: FlatlandProgram) -> Canvas:
    """Deterministic rasterization of a program to a 128x128 binary canvas."""
    return render_with_state(program)[0]


def _param_equal(a: float, b: float) -> bool:
    if isinstance(a, int) and isinstance(b, int):
        return a == b
    return abs(a - b) <= PARAM_TOLERANCE


def _pair_weight(a: Primitive, b: Primitive) -> int:
    if isinstance(a, Move) and isinstance(b, Move):
        return 1 if _param_equal(a.length, b.length) else 0
    if isinstance(a, Turn) and isinstance(b, Turn):
        return 1 if _param_equal(a.angle, b.angle) else 0
    return 0


def best_order_preserving_match(
    a: Sequence[Primitive], b: Sequence[Primitive]
) -> tuple[int, list[tuple[int, int]]]:
    """Heaviest order-preserving matching between two primitive lists.

    Equivalent to the maximum-weight clique of the association graph whose
    vertices pair equal same-command elements and whose edges require both
    index orders to agree; computed by dynamic programming since the order
    constraint makes the optimum decomposable. Ties resolve to the
    lexicographically smallest pair list.
    """
    n, m = len(a), len(b)
    suffix = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row = suffix[i]
        below = suffix[i + 1]
        for j in range(m - 1, -1, -1):
            best = below[j] if below[j] >= row[j + 1] else row[j + 1]
            paired = _pair_weight(a[i], b[j]) + below[j + 1]
            row[j] = paired if paired > best else best

    pairs: list[tuple[int, int]] = []
    i = j = 0
    while i < n and j < m:
        if _pair_weight(a[i], b[j]) == 1 and 1 + suffix[i + 1][j + 1] == suffix[i][j]:
            pairs.append((i, j))
            i += 1
            j += 1
        elif suffix[i][j + 1] == suffix[i][j]:
            j += 1
        else:
            i += 1
    return suffix[0][0], pairs


def flatland_delta(p1: FlatlandProgram, p2: FlatlandProgram) -> float:
    """List divergence: 1 - (matched weight)^2 / (len(a) * len(b)); 1.0 when
    either flattened list is empty."""
    a = flatten(p1)
    b = flatten(p2)
    if not a or not b:
        return 1.0
    total, _ = best_order_preserving_match(a, b)
    return _delta_value(Fraction(total), len(a), len(b))


@dataclass(frozen=True)
class AugmentParams:
    """Bounds for augmentation perturbations.

    Retries shrink the perturbation probabilities geometrically until the
    divergence bound holds; the final attempt is an exact copy.
    """

    length_jitter: float = 2.0
    angle_jitter: float = 15.0
    element_prob: float = 0.2
    loop_count_prob: float = 0.15
    prepend_prob: float = 0.5
    max_delta: float = 0.3
    retries: int = 8


def _perturb(
    items: Sequence[Primitive], rng: random.Random, params: AugmentParams, scale: float
) -> tuple[Primitive, ...]:
    out: list[Primitive] = []
    for item in items:
        if isinstance(item, Move):
            if rng.random() < params.element_prob * scale:
                out.append(Move(item.length + rng.uniform(-1, 1) * params.length_jitter))
            else:
                out.append(item)
        elif isinstance(item, Turn):
            if rng.random() < params.element_prob * scale:
                out.append(Turn(item.angle + rng.uniform(-1, 1) * params.angle_jitter))
            else:
                out.append(item)
        else:
            count = item.count
            if rng.random() < params.loop_count_prob * scale:
                count = max(1, count + rng.choice((-1, 1)))
            out.append(Loop(count, _perturb(item.body, rng, params, scale)))
    return tuple(out)


def augment(
    program: FlatlandProgram, seed: int, params: AugmentParams = AugmentParams()
) -> FlatlandProgram:
    """Produce a seeded random variation whose divergence from the input stays
    within ``params.max_delta``; retries with shrinking perturbation."""
    rng = random.Random(f"flatland-augment:{seed}")
    for attempt in range(max(1, params.retries)):
        last = attempt == max(1, params.retries) - 1
        scale = 0.0 if last else 0.5**attempt
        items = _perturb(program.items, rng, params, scale)
        if not last and rng.random() < params.prepend_prob * scale:
            prelude: tuple[Primitive, ...] = (
                Turn(rng.uniform(0.0, 360.0)),
                Move(rng.uniform(1.0, 12.0)),
            )
            items = prelude + items
        candidate = FlatlandProgram(items)
        if flatland_delta(program, candidate) <= params.max_delta:
            return candidate
    raise CannotSatisfyBoundError(
        f"could not reach divergence <= {params.max_delta} in {params.retries} attempts"
    )


#: Discrete parameter pools keep generated shapes alignable for matching.
_ANGLE_POOL = (0.0, 30.0, 45.0, 60.0, 90.0, 120.0, 135.0, 180.0, 225.0, 270.0, 315.0)
_REPOSITION_POOL = (6.0, 8.0, 10.0, 12.0, 16.0, 20.0)
_LINE_POOL = (10.0, 14.0, 18.0, 22.0, 26.0, 30.0, 36.0, 42.0)
_CIRCLE_STEP_POOL = (2.0, 3.0, 4.0)
_CIRCLE_SEGMENTS = 36


def circle_program(step: float) -> list[Primitive]:
    """Polygonal circle: 36 segments of ``step`` pixels with 10-degree turns."""
    return [Loop(_CIRCLE_SEGMENTS, (Move(step), Turn(360.0 / _CIRCLE_SEGMENTS)))]


@dataclass(frozen=True)
class DatasetSpec:
    """What to generate: shape kinds, shapes per image, and sample count."""

    kinds: str = "mixed"
    count_min: int = 1
    count_max: int = 5
    size: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kinds not in ("lines", "circles", "mixed"):
            raise InvalidConfigError(f"unknown shape kind '{self.kinds}'")
        if not 1 <= self.count_min <= self.count_max:
            raise InvalidConfigError("shape count range must satisfy 1 <= min <= max")
        if self.size < 1:
            raise InvalidConfigError("dataset size must be positive")


def generate_dataset(spec: DatasetSpec) -> list[tuple[FlatlandProgram, Canvas]]:
    """Seeded, reproducible programs of repositioning strokes plus line or
    circle shapes, with their rendered canvases. Samples derive independent
    seeds, so the list is stable under any evaluation order."""
    samples: list[tuple[FlatlandProgram, Canvas]] = []
    for k in range(spec.size):
        rng = random.Random(f"flatland-dataset:{spec.seed}:{k}")
        items: list[Primitive] = []
        for _ in range(rng.randint(spec.count_min, spec.count_max)):
            kind = spec.kinds
            if kind == "mixed":
                kind = rng.choice(("lines", "circles"))
            items.append(Turn(rng.choice(_ANGLE_POOL)))
            items.append(Move(rng.choice(_REPOSITION_POOL)))
            if kind == "lines":
                items.append(Move(rng.choice(_LINE_POOL)))
            else:
                items.extend(circle_program(rng.choice(_CIRCLE_STEP_POOL)))
        program = FlatlandProgram(tuple(items))
        samples.append((program, render(program)))
    return samples


def _primitive_to_obj(item: Primitive) -> dict[str, Any]:
    if isinstance(item, Move):
        return {"type": "move", "length": item.length}
    if isinstance(item, Turn):
        return {"type": "turn", "angle": item.angle}
    return {"type": "loop", "count": item.count, "body": [_primitive_to_obj(i) for i in item.body]}


def _obj_to_primitive(obj: Any, where: str) -> Primitive:
    if not isinstance(obj, dict) or not isinstance(obj.get("type"), str):
        raise FlatlandFormatError(f"{where}: primitive must be an object with a 'type'")
    kind = obj["type"]
    if kind == "move":
        length = obj.get("length")
        if isinstance(length, bool) or not isinstance(length, (int, float)):
            raise FlatlandFormatError(f"{where}: move needs a numeric 'length'")
        return Move(float(length))
    if kind == "turn":
        angle = obj.get("angle")
        if isinstance(angle, bool) or not isinstance(angle, (int, float)):
            raise FlatlandFormatError(f"{where}: turn needs a numeric 'angle'")
        return Turn(float(angle))
    if kind == "loop":
        count = obj.get("count")
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise FlatlandFormatError(f"{where}: loop needs a positive integer 'count'")
        body = obj.get("body")
        if not isinstance(body, list):
            raise FlatlandFormatError(f"{where}: loop needs a 'body' array")
        return Loop(
            count,
            tuple(_obj_to_primitive(b, f"{where}.body[{k}]") for k, b in enumerate(body)),
        )
    raise FlatlandFormatError(f"{where}: unknown primitive type '{kind}'")


def to_flat_list(program: FlatlandProgram) -> list[dict[str, Any]]:
    """The comparison form: loops unrolled, one object per move/turn."""
    return [_primitive_to_obj(item) for item in flatten(program)]


def from_primitive_list(objs: Sequence[Any]) -> FlatlandProgram:
    """Build a program from a plain primitive-object list (loops allowed)."""
    return FlatlandProgram(
        tuple(_obj_to_primitive(o, f"item[{k}]") for k, o in enumerate(objs))
    )


def to_flow_document(program: FlatlandProgram) -> str:
    """Serialize as a flow-program document: one node per top-level primitive,
    wired in sequence; loop bodies nest as a plain 'body' attribute."""
    nodes = []
    for k, item in enumerate(program.items):
        obj = _primitive_to_obj(item)
        kind = obj.pop("type")
        wires: tuple[tuple[str, ...], ...] = ()
        if k + 1 < len(program.items):
            wires = ((f"p{k + 1}",),)
        nodes.append(FlowNode(id=f"p{k}", node_type=kind, attributes=obj, out_wires=wires))
    return serialize_flow(FlowProgram(nodes=tuple(nodes)))


def from_flow_document(text: str) -> FlatlandProgram:
    """Parse the flow form back into a program; the nodes must form one chain."""
    flow = parse_flow(text)
    if not flow.nodes:
        return FlatlandProgram()
    by_id = {node.id: node for node in flow.nodes}
    targets: set[str] = set()
    succ: dict[str, str] = {}
    for node in flow.nodes:
        outs = [t for port in node.out_wires for t in port]
        if len(outs) > 1:
            raise FlatlandFormatError(f"node '{node.id}': programs must be a single chain")
        if outs:
            succ[node.id] = outs[0]
            targets.add(outs[0])
    heads = [n.id for n in flow.nodes if n.id not in targets]
    if len(heads) != 1:
        raise FlatlandFormatError("programs must have exactly one chain head")
    order: list[FlowNode] = []
    cursor: str | None = heads[0]
    while cursor is not None:
        order.append(by_id[cursor])
        cursor = succ.get(cursor)
    if len(order) != len(flow.nodes):
        raise FlatlandFormatError("all nodes must lie on one chain")
    items = tuple(
        _obj_to_primitive({"type": node.node_type, **node.attributes}, f"node '{node.id}'")
        for node in order
    )
    return FlatlandProgram(items)


def parse_program(text: str) -> FlatlandProgram:
    """Accept either the flow form or the plain primitive-list form."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FlatlandFormatError(f"invalid program document: {exc}") from exc
    if isinstance(doc, list) and doc and all(isinstance(o, dict) and "id" in o for o in doc):
        return from_flow_document(text)
    if isinstance(doc, list):
        return from_primitive_list(doc)
    raise FlatlandFormatError("program document must be a JSON array")
