"""
Text readers and writers of the problem files.

Every format parses the full text at once and reports the 1-based line of the first offending entry through
:class:`ParseError`. Writers emit floats with ``repr`` so that reading the written text gives back the same values.
"""
import abc
import re
import sys
from typing import Any, Dict, Iterator, List, Optional, Tuple, Type

import numpy as np

from sdpkit.impl import DimensionMismatch, DomainError, InputError, ParseError, check_size
from sdpkit.maxcut import WeightedGraph
from sdpkit.qcr import BinQp
from sdpkit.sdpmodel import BlockMatrix, PrimalSdp, Sense
from sdpkit.sos import HomPoly
from sdpkit.symcore import SymMatrix
from sdpkit.theta import Graph
from sdpkit.utils import get_logger

LOGGER = get_logger(__name__)

MAX_FILE_ORDER = 500
SYMMETRY_RTOL = 1e-12
STDIN_PATH = "-"

Line = Tuple[int, List[str]]


def _content_lines(text: str, comments: str = "#") -> Iterator[Line]:
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line[0] in comments:
            continue
        yield number, line.split()


def _next_line(lines: Iterator[Line], what: str, last: int = 0) -> Line:
    try:
        return next(lines)
    except StopIteration:
        raise ParseError(last + 1, f"unexpected end of input, expected {what}")


def _to_int(number: int, field: str) -> int:
    try:
        return int(field)
    except ValueError:
        raise ParseError(number, f"expected an integer, got [{field}]")


def _to_floats(number: int, fields: List[str], count: Optional[int] = None) -> List[float]:
    if count is not None and len(fields) != count:
        raise ParseError(number, f"expected [{count}] values, got [{len(fields)}]")
    try:
        return [float(field) for field in fields]
    except ValueError as exc:
        raise ParseError(number, f"invalid number: {exc}")


def _no_trailing(lines: Iterator[Line]) -> None:
    for number, fields in lines:
        raise ParseError(number, f"unexpected trailing content [{' '.join(fields)}]")


def _order(number: int, field: str, name: str) -> int:
    n = _to_int(number, field)
    if n < 1:
        raise ParseError(number, f"{name} must be positive, got [{n}]")
    try:
        check_size(name, n, MAX_FILE_ORDER)
    except InputError as exc:
        raise ParseError(number, str(exc))
    return n


def _is_diagonal(block: np.ndarray) -> bool:
    return not np.count_nonzero(block - np.diag(np.diag(block)))


def _float_text(value: float) -> str:
    value = float(value)
    if value.is_integer():
        return str(int(value))
    return repr(value)


class TextFormat(abc.ABC):
    """
    Reader and writer of one kind of problem file.
    """
    name = ""  # type: str

    @abc.abstractmethod
    def read(self, text: str) -> Any:
        raise NotImplementedError

    @abc.abstractmethod
    def write(self, value: Any) -> str:
        raise NotImplementedError

    def load(self, path: str) -> Any:
        """
        Parses the file at ``path``, or standard input when ``path`` is ``-``.
        """
        if path == STDIN_PATH:
            text = sys.stdin.read()
        else:
            with open(path, mode="r", encoding="utf-8") as problem_file:
                text = problem_file.read()
        LOGGER.debug("Parsing [%s] input from [%s]", self.name, path)
        return self.read(text)

    def dump(self, value: Any, path: str) -> None:
        text = self.write(value)
        if path == STDIN_PATH:
            sys.stdout.write(text)
            return
        with open(path, mode="w", encoding="utf-8") as problem_file:
            problem_file.write(text)


class MatrixFormat(TextFormat):
    """
    Symmetric matrix: a line ``n`` followed by ``n`` rows of ``n`` values, or a line ``n sparse`` followed by
    ``i j value`` triplets (1-indexed, upper triangle, missing entries are zero).
    """
    name = "matrix"

    def read(self, text: str) -> SymMatrix:
        lines = _content_lines(text)
        number, header = _next_line(lines, "the matrix order")
        if len(header) not in (1, 2) or (len(header) == 2 and header[1] != "sparse"):
            raise ParseError(number, f"expected header [n] or [n sparse], got [{' '.join(header)}]")
        n = _order(number, header[0], "matrix order")
        if len(header) == 2:
            return self._read_sparse(n, lines)
        rows = []
        row_lines = []
        for _ in range(n):
            number, fields = _next_line(lines, f"row [{len(rows) + 1}] of [{n}]", number)
            rows.append(_to_floats(number, fields, n))
            row_lines.append(number)
        _no_trailing(lines)
        values = np.array(rows)
        for i in range(n):
            for j in range(i):
                scale = max(1.0, abs(values[i, j]), abs(values[j, i]))
                if abs(values[i, j] - values[j, i]) > SYMMETRY_RTOL * scale:
                    raise ParseError(row_lines[i], f"asymmetric entry [{i + 1},{j + 1}]: "
                                                   f"[{values[i, j]}] != [{values[j, i]}]")
        return SymMatrix((values + values.T) / 2.0)

    @staticmethod
    def _read_sparse(n: int, lines: Iterator[Line]) -> SymMatrix:
        values = np.zeros((n, n))
        seen = set()
        for number, fields in lines:
            if len(fields) != 3:
                raise ParseError(number, f"expected [i j value], got [{' '.join(fields)}]")
            i, j = _to_int(number, fields[0]), _to_int(number, fields[1])
            value = _to_floats(number, fields[2:])[0]
            if not (1 <= i <= j <= n):
                raise ParseError(number, f"entry [{i},{j}] is not in the upper triangle of order [{n}]")
            if (i, j) in seen:
                raise ParseError(number, f"duplicate entry [{i},{j}]")
            seen.add((i, j))
            values[i - 1, j - 1] = values[j - 1, i - 1] = value
        return SymMatrix(values)

    def write(self, value: Any) -> str:
        values = np.asarray(value, dtype=float)
        lines = [str(values.shape[0])]
        lines.extend(" ".join(_float_text(v) for v in row) for row in values)
        return "\n".join(lines) + "\n"


class GraphFormat(TextFormat):
    """
    Undirected graph, either as the compact string ``n;i-j,i-j,...`` or as an edge list with a header
    ``p n m`` (``p edge n m`` also accepted) and ``m`` lines ``e i j``. Lines starting with ``c`` are comments.
    """
    name = "graph"
    weighted = False

    def read(self, text: str) -> Any:
        lines = _content_lines(text, comments="#c")
        number, fields = _next_line(lines, "a graph header")
        if ";" in fields[0]:
            _no_trailing(lines)
            return self._read_compact(number, "".join(fields))
        if fields[0] != "p" or len(fields) not in (3, 4) or (len(fields) == 4 and fields[1] != "edge"):
            raise ParseError(number, f"expected header [p n m], got [{' '.join(fields)}]")
        n = _order(number, fields[-2], "vertex count")
        m = _to_int(number, fields[-1])
        edges = []
        last = number
        for number, fields in lines:
            last = number
            if fields[0] != "e" or len(fields) not in (3, 4) or (len(fields) == 4 and not self.weighted):
                raise ParseError(number, f"expected an edge line, got [{' '.join(fields)}]")
            i, j = _to_int(number, fields[1]), _to_int(number, fields[2])
            weight = _to_floats(number, fields[3:])[0] if len(fields) == 4 else 1.0
            edges.append((number, i, j, weight))
        if len(edges) != m:
            raise ParseError(last, f"header announces [{m}] edges, found [{len(edges)}]")
        return self._build(n, edges)

    def _read_compact(self, number: int, text: str) -> Any:
        head, _, tail = text.partition(";")
        n = _order(number, head, "vertex count")
        edges = []
        for pair in filter(None, tail.split(",")):
            match = re.fullmatch(r"(\d+)-(\d+)", pair)
            if not match:
                raise ParseError(number, f"invalid edge [{pair}]")
            edges.append((number, int(match.group(1)), int(match.group(2)), 1.0))
        return self._build(n, edges)

    def _build(self, n: int, edges: List[Tuple[int, int, int, float]]) -> Any:
        pairs = set()
        for number, i, j, _ in edges:
            pair = (min(i, j), max(i, j))
            if i == j or not (1 <= i <= n and 1 <= j <= n) or pair in pairs:
                raise ParseError(number, f"invalid or duplicate edge [{i}-{j}] for [{n}] vertices")
            pairs.add(pair)
        try:
            if self.weighted:
                return WeightedGraph.from_edges(n, [(i, j, w) for _, i, j, w in edges])
            return Graph(n, [(i, j) for _, i, j, _ in edges])
        except DomainError as exc:
            raise ParseError(edges[0][0] if edges else 0, str(exc))

    def write(self, value: Graph) -> str:
        lines = [f"p {value.n} {len(value.edges)}"]
        lines.extend(f"e {i} {j}" for i, j in value.sorted_edges())
        return "\n".join(lines) + "\n"


class WeightedGraphFormat(GraphFormat):
    """
    Edge list with optional weights ``e i j w`` (weight ``1`` when omitted).
    """
    name = "weighted-graph"
    weighted = True

    def write(self, value: WeightedGraph) -> str:
        edges = value.edges()
        lines = [f"p {value.n} {len(edges)}"]
        lines.extend(f"e {i} {j} {_float_text(w)}" for i, j, w in edges)
        return "\n".join(lines) + "\n"


class PolyFormat(TextFormat):
    """
    Homogeneous polynomial, one term ``coeff e_1 ... e_n`` per line.
    """
    name = "poly"

    def read(self, text: str) -> HomPoly:
        return HomPoly.from_text(text)

    def write(self, value: HomPoly) -> str:
        return value.to_text()


class BinQpFormat(TextFormat):
    """
    Binary quadratic program: a line ``n p``, the ``n`` rows of ``Q``, one line ``c``, the ``p`` rows of ``A`` and,
    when ``p > 0``, one line ``b``.
    """
    name = "binqp"

    def read(self, text: str) -> BinQp:
        lines = _content_lines(text)
        number, header = _next_line(lines, "the header [n p]")
        if len(header) != 2:
            raise ParseError(number, f"expected header [n p], got [{' '.join(header)}]")
        n = _order(number, header[0], "variable count")
        p = _to_int(number, header[1])
        if not 0 <= p <= n:
            raise ParseError(number, f"constraint count must lie in [0, {n}], got [{p}]")
        Q = []
        for k in range(n):
            number, fields = _next_line(lines, f"row [{k + 1}] of Q", number)
            Q.append(_to_floats(number, fields, n))
        number, fields = _next_line(lines, "the linear term c", number)
        c = _to_floats(number, fields, n)
        A = []
        for k in range(p):
            number, fields = _next_line(lines, f"row [{k + 1}] of A", number)
            A.append(_to_floats(number, fields, n))
        b = []
        if p:
            number, fields = _next_line(lines, "the right-hand side b", number)
            b = _to_floats(number, fields, p)
        _no_trailing(lines)
        Q = np.array(Q)
        if not np.allclose(Q, Q.T, rtol=0.0, atol=SYMMETRY_RTOL * max(1.0, float(np.abs(Q).max()))):
            raise ParseError(0, "matrix Q is not symmetric")
        try:
            return BinQp(Q, c, np.array(A).reshape(p, n), b)
        except (DimensionMismatch, InputError) as exc:
            raise ParseError(0, str(exc))

    def write(self, value: BinQp) -> str:
        lines = [f"{value.n} {value.p}"]
        lines.extend(" ".join(_float_text(v) for v in row) for row in np.asarray(value.Q))
        lines.append(" ".join(_float_text(v) for v in value.c))
        lines.extend(" ".join(_float_text(v) for v in row) for row in value.A)
        if value.p:
            lines.append(" ".join(_float_text(v) for v in value.b))
        return "\n".join(lines) + "\n"


class SdpaFormat(TextFormat):
    """
    Sparse SDPA primal ``min c.x  s.t.  sum_i x_i F_i - F_0 >= 0``: lines ``m``, ``nblocks``, the block sizes (a
    negative size is a diagonal block), the ``m`` costs, then entries ``matno blkno i j value`` of the upper
    triangles, ``matno 0`` being ``F_0``. Leading lines starting with ``"`` or ``*`` are comments and the
    separators ``, { } ( )`` are ignored.

    Sign constraints on variables are written as a trailing diagonal block.
    """
    name = "sdpa"

    def read(self, text: str) -> PrimalSdp:
        text = re.sub(r"[,{}()]", " ", text)
        lines = _content_lines(text, comments="\"*")
        number, fields = _next_line(lines, "the variable count")
        m = _order(number, fields[0], "variable count")
        number, fields = _next_line(lines, "the block count", number)
        nblocks = _order(number, fields[0], "block count")
        number, fields = _next_line(lines, "the block sizes", number)
        if len(fields) != nblocks:
            raise ParseError(number, f"expected [{nblocks}] block sizes, got [{len(fields)}]")
        sizes = [_to_int(number, field) for field in fields]
        if 0 in sizes:
            raise ParseError(number, "block sizes must be nonzero")
        structure = [abs(size) for size in sizes]
        try:
            check_size("total block order", sum(structure), MAX_FILE_ORDER)
        except InputError as exc:
            raise ParseError(number, str(exc))
        number, fields = _next_line(lines, "the cost vector", number)
        c = _to_floats(number, fields, m)
        mats = [[np.zeros((k, k)) for k in structure] for _ in range(m + 1)]
        seen = set()
        for number, fields in lines:
            if len(fields) != 5:
                raise ParseError(number, f"expected [matno blkno i j value], got [{' '.join(fields)}]")
            matno, blkno, i, j = (_to_int(number, field) for field in fields[:4])
            value = _to_floats(number, fields[4:])[0]
            if not 0 <= matno <= m:
                raise ParseError(number, f"matrix number [{matno}] outside [0, {m}]")
            if not 1 <= blkno <= nblocks:
                raise ParseError(number, f"block number [{blkno}] outside [1, {nblocks}]")
            size = structure[blkno - 1]
            if not 1 <= i <= j <= size:
                raise ParseError(number, f"entry [{i},{j}] is not in the upper triangle of block [{blkno}]")
            if sizes[blkno - 1] < 0 and i != j:
                raise ParseError(number, f"off-diagonal entry [{i},{j}] in diagonal block [{blkno}]")
            key = (matno, blkno, i, j)
            if key in seen:
                raise ParseError(number, f"duplicate entry [{matno} {blkno} {i} {j}]")
            seen.add(key)
            block = mats[matno][blkno - 1]
            block[i - 1, j - 1] = block[j - 1, i - 1] = value
        return PrimalSdp(c, [BlockMatrix(blocks) for blocks in mats[1:]], BlockMatrix(mats[0]))

    def write(self, value: PrimalSdp) -> str:
        if value.sense is not Sense.MIN:
            raise DomainError("Sparse SDPA files only hold minimization problems")
        if value.offset != 0.0:
            raise DomainError(f"Sparse SDPA files cannot hold the objective offset [{value.offset}]")
        mats = [value.B] + list(value.A)
        sizes = []
        for blkno, size in enumerate(value.structure):
            diagonal = all(_is_diagonal(np.asarray(mat[blkno])) for mat in mats)
            sizes.append(-size if diagonal and size > 1 else size)
        signs = sorted(value.nonneg_vars)
        if signs:
            sizes.append(-len(signs) if len(signs) > 1 else 1)
        lines = [str(value.n), str(len(sizes)), " ".join(str(size) for size in sizes),
                 " ".join(_float_text(v) for v in value.c)]
        for matno, mat in enumerate(mats):
            for blkno, block in enumerate(mat, start=1):
                block = np.asarray(block)
                rows, cols = np.nonzero(np.triu(block))
                lines.extend(f"{matno} {blkno} {i + 1} {j + 1} {_float_text(block[i, j])}" for i, j in zip(rows, cols))
            if signs and matno > 0 and matno - 1 in value.nonneg_vars:
                lines.append(f"{matno} {len(sizes)} {signs.index(matno - 1) + 1} {signs.index(matno - 1) + 1} 1")
        return "\n".join(lines) + "\n"


# known implementations
FORMAT_TYPES = {
    fmt.name: fmt for fmt in (MatrixFormat, GraphFormat, WeightedGraphFormat, PolyFormat, BinQpFormat, SdpaFormat)
}  # type: Dict[str, Type[TextFormat]]


def get_format(name: str) -> TextFormat:
    fmt = FORMAT_TYPES.get(name)
    if fmt is None:
        raise DomainError(f"Unknown file format [{name}], expected one of {list(FORMAT_TYPES)}")
    return fmt()


def parse_matrix(path: str) -> SymMatrix:
    return MatrixFormat().load(path)


def parse_graph(path: str) -> Graph:
    return GraphFormat().load(path)


def parse_weighted_graph(path: str) -> WeightedGraph:
    return WeightedGraphFormat().load(path)


def parse_poly(path: str) -> HomPoly:
    return PolyFormat().load(path)


def parse_binqp(path: str) -> BinQp:
    return BinQpFormat().load(path)


def parse_sdpa(path: str) -> PrimalSdp:
    return SdpaFormat().load(path)
