"""Dense linear algebra over F2 on bit-packed rows.

A :class:`BitMatrix` stores each row as ``ceil(cols / 64)`` little-endian
64-bit words; column ``j`` of a row lives in bit ``j % 64`` of word
``j // 64``. Padding bits past ``cols`` are always zero, so equality and
hashing reduce to comparing the word arrays.

Elimination routines (rank, rref, kernel, solve) work on rows converted to
Python integers, which XOR a whole row in one operation regardless of width.
"""

from __future__ import annotations

import struct
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionError, FormatError
from .rng import Rng

WORD_BITS = 64

#: Largest row or column count accepted by constructors.
MAX_DIM = 4096
#: Largest total bit count a Kronecker product may produce.
MAX_KRON_BITS = 1 << 24


def _nwords(cols: int) -> int:
    return (cols + WORD_BITS - 1) // WORD_BITS


def _tail_mask(cols: int) -> np.uint64:
    rem = cols % WORD_BITS
    return np.uint64((1 << rem) - 1) if rem else np.uint64(0xFFFFFFFFFFFFFFFF)


class BitMatrix:
    """Immutable dense F2 matrix, bit-packed by row."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray | None = None):
        if rows < 0 or cols < 0:
            raise DimensionError(f"negative shape {rows}x{cols}")
        if rows > MAX_DIM or cols > MAX_DIM:
            raise DimensionError(f"shape {rows}x{cols} exceeds MAX_DIM={MAX_DIM}")
        nw = _nwords(cols)
        if data is None:
            data = np.zeros((rows, nw), dtype="<u8")
        else:
            data = np.ascontiguousarray(data, dtype="<u8").reshape(rows, nw)
            if nw and cols % WORD_BITS:
                if np.any(data[:, -1] & ~_tail_mask(cols)):
                    data = data.copy()
                    data[:, -1] &= _tail_mask(cols)
        if data.flags.writeable:
            data = data.copy() if data.base is not None else data
            data.flags.writeable = False
        self.rows = rows
        self.cols = cols
        self.data = data

    # -- construction -----------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> BitMatrix:
        return cls(rows, rows if cols is None else cols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls.from_array(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_array(cls, arr) -> BitMatrix:
        """Build from any 2-D array-like of 0/1 (values are taken mod 2)."""
        a = np.asarray(arr)
        if a.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got ndim={a.ndim}")
        rows, cols = a.shape
        bits = (a.astype(np.int64) & 1).astype(np.uint8)
        nw = _nwords(cols)
        padded = np.zeros((rows, nw * WORD_BITS), dtype=np.uint8)
        padded[:, :cols] = bits
        packed = np.packbits(padded, axis=1, bitorder="little")
        return cls(rows, cols, packed.view("<u8").reshape(rows, nw))

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> BitMatrix:
        """``BitMatrix.from_rows(["110", "011"])``; leftmost char is column 0."""
        return cls.from_array([[int(c) for c in r] for r in rows])

    @classmethod
    def from_ints(cls, ints: Sequence[int], cols: int) -> BitMatrix:
        """Rows given as Python ints, bit ``j`` of each int being column ``j``."""
        rows = len(ints)
        nw = _nwords(cols)
        if nw == 1:
            data = np.array(ints, dtype=np.uint64).reshape(rows, 1)
        elif rows == 0 or nw == 0:
            data = np.zeros((rows, nw), dtype="<u8")
        else:
            nbytes = nw * 8
            buf = b"".join(int(v).to_bytes(nbytes, "little") for v in ints)
            data = np.frombuffer(buf, dtype="<u8").reshape(rows, nw).copy()
        return cls(rows, cols, data)

    @classmethod
    def from_vector(cls, v, column: bool = True) -> BitMatrix:
        v = np.asarray(v, dtype=np.uint8).reshape(-1)
        return cls.from_array(v.reshape(-1, 1) if column else v.reshape(1, -1))

    # -- views ------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_array(self) -> np.ndarray:
        """Unpacked ``uint8`` array of 0/1 with shape ``(rows, cols)``."""
        if self.rows == 0 or self.cols == 0:
            return np.zeros((self.rows, self.cols), dtype=np.uint8)
        bits = np.unpackbits(self.data.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.cols]

    def to_ints(self) -> list[int]:
        if self.data.shape[1] == 1:
            return [int(x) for x in self.data[:, 0]]
        if self.data.shape[1] == 0:
            return [0] * self.rows
        return [int.from_bytes(row.tobytes(), "little") for row in self.data]

    def row_vector(self) -> np.ndarray:
        """Flatten a 1 x m or m x 1 matrix into a bit vector."""
        if self.rows != 1 and self.cols != 1:
            raise DimensionError(f"{self.rows}x{self.cols} is not a vector")
        return self.to_array().reshape(-1)

    def __getitem__(self, idx) -> int:
        i, j = idx
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError((i, j))
        return int((int(self.data[i, j // WORD_BITS]) >> (j % WORD_BITS)) & 1)

    def block(self, i: int, j: int, size: int) -> BitMatrix:
        """The ``size`` x ``size`` sub-matrix at block coordinates ``(i, j)``."""
        a = self.to_array()[i * size:(i + 1) * size, j * size:(j + 1) * size]
        return BitMatrix.from_array(a)

    def weight(self) -> int:
        return int(np.bitwise_count(self.data).sum())

    def is_zero(self) -> bool:
        return not self.data.any()

    # -- operators --------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data.tobytes()))

    def __add__(self, other: BitMatrix) -> BitMatrix:
        return add(self, other)

    __sub__ = __add__
    __xor__ = __add__

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        return mul(self, other)

    @property
    def T(self) -> BitMatrix:
        return transpose(self)

    def __repr__(self) -> str:
        if self.rows * self.cols <= 256:
            body = ",".join("".join(map(str, r)) for r in self.to_array())
            return f"BitMatrix({self.rows}x{self.cols}: {body})"
        return f"BitMatrix({self.rows}x{self.cols}, weight={self.weight()})"

    # -- binary encoding ---------------------------------------------------

    def to_bytes(self) -> bytes:
        """u32 rows, u32 cols (LE), then ceil(cols/8) bytes per row, LSB-first."""
        nbytes = (self.cols + 7) // 8
        body = self.data.view(np.uint8).reshape(self.rows, -1)[:, :nbytes]
        return struct.pack("<II", self.rows, self.cols) + body.tobytes()

    @classmethod
    def from_bytes(cls, buf: bytes, offset: int = 0) -> tuple[BitMatrix, int]:
        """Decode one matrix starting at ``offset``; returns ``(matrix, new_offset)``."""
        if len(buf) - offset < 8:
            raise FormatError("truncated matrix header")
        rows, cols = struct.unpack_from("<II", buf, offset)
        if rows > MAX_DIM or cols > MAX_DIM:
            raise FormatError(f"matrix dimensions {rows}x{cols} exceed MAX_DIM")
        offset += 8
        nbytes = (cols + 7) // 8
        size = rows * nbytes
        if len(buf) - offset < size:
            raise FormatError("truncated matrix body")
        body = np.frombuffer(buf, dtype=np.uint8, count=size, offset=offset).reshape(rows, nbytes)
        nw = _nwords(cols)
        padded = np.zeros((rows, nw * 8), dtype=np.uint8)
        padded[:, :nbytes] = body
        data = padded.view("<u8").reshape(rows, nw)
        if nw and cols % WORD_BITS and np.any(data[:, -1] & ~_tail_mask(cols)):
            raise FormatError("non-zero padding bits in matrix encoding")
        return cls(rows, cols, data), offset + size


class MatrixTuple:
    """Ordered sequence of equally sized matrices (the bold A, H, C)."""

    __slots__ = ("items", "shape")

    def __init__(self, items: Iterable[BitMatrix], shape: tuple[int, int] | None = None):
        items = tuple(items)
        if items:
            first = items[0].shape
            if shape is not None and tuple(shape) != first:
                raise DimensionError(f"declared shape {shape} but items are {first}")
            for m in items:
                if m.shape != first:
                    raise DimensionError(f"non-uniform tuple: {m.shape} vs {first}")
            shape = first
        elif shape is None:
            raise DimensionError("an empty MatrixTuple needs an explicit shape")
        self.items = items
        self.shape = tuple(shape)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[BitMatrix]:
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixTuple):
            return NotImplemented
        return self.shape == other.shape and self.items == other.items

    def __hash__(self) -> int:
        return hash((self.shape, self.items))

    def __repr__(self) -> str:
        return f"MatrixTuple(len={len(self.items)}, shape={self.shape})"

    def combine(self, v) -> BitMatrix:
        """Linear combination ``sum_i v_i * A_i``."""
        v = np.asarray(v, dtype=np.uint8).reshape(-1)
        if v.size != len(self.items):
            raise DimensionError(f"coefficient vector of length {v.size} for {len(self.items)} matrices")
        acc = np.zeros((self.shape[0], _nwords(self.shape[1])), dtype="<u8")
        for bit, m in zip(v, self.items):
            if bit & 1:
                acc ^= m.data
        return BitMatrix(self.shape[0], self.shape[1], acc)

    def append(self, m: BitMatrix) -> MatrixTuple:
        return MatrixTuple(self.items + (m,), self.shape)


# -- arithmetic -------------------------------------------------------------


def _check_same(a: BitMatrix, b: BitMatrix, op: str) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} differ")


def add(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    _check_same(a, b, "add")
    return BitMatrix(a.rows, a.cols, a.data ^ b.data)


def scale_accumulate(acc: BitMatrix, bit: int, a: BitMatrix) -> BitMatrix:
    """``acc + bit * a``."""
    _check_same(acc, a, "scale_accumulate")
    return add(acc, a) if bit & 1 else acc


def mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Matrix product by XOR-accumulating packed rows of ``b``.

    Row ``i`` of the product is the XOR of the rows ``b[j]`` with
    ``a[i, j] = 1``; each step processes all output rows at once, so the cost
    is ``a.cols`` passes over ``a.rows * words(b.cols)`` words.
    """
    if a.cols != b.rows:
        raise DimensionError(f"mul: {a.shape} @ {b.shape}")
    out = np.zeros((a.rows, b.data.shape[1]), dtype="<u8")
    if a.rows == 0 or b.cols == 0:
        return BitMatrix(a.rows, b.cols, out)
    abits = a.to_array().astype(bool)
    for j in np.flatnonzero(abits.any(axis=0)):
        out[abits[:, j]] ^= b.data[j]
    return BitMatrix(a.rows, b.cols, out)


def transpose(a: BitMatrix) -> BitMatrix:
    return BitMatrix.from_array(a.to_array().T)


def matvec(a: BitMatrix, v) -> np.ndarray:
    """``a @ v`` for a bit vector ``v``; returns a bit vector."""
    v = np.asarray(v, dtype=np.uint8).reshape(-1)
    if v.size != a.cols:
        raise DimensionError(f"matvec: {a.shape} @ vector of length {v.size}")
    return ((a.to_array().astype(np.int64) @ v.astype(np.int64)) & 1).astype(np.uint8)


def kron(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    rows, cols = a.rows * b.rows, a.cols * b.cols
    if rows * cols > MAX_KRON_BITS or rows > MAX_DIM or cols > MAX_DIM:
        raise DimensionError(f"kron result {rows}x{cols} exceeds the size guard")
    return BitMatrix.from_array(np.kron(a.to_array(), b.to_array()))


def vec(a: BitMatrix) -> np.ndarray:
    """Column-stacking vectorization: ``(a11, a21, ..., a12, a22, ...)``."""
    return a.to_array().reshape(-1, order="F").copy()


def unvec(v, rows: int, cols: int) -> BitMatrix:
    v = np.asarray(v, dtype=np.uint8).reshape(-1)
    if v.size != rows * cols:
        raise DimensionError(f"unvec: {v.size} bits into {rows}x{cols}")
    return BitMatrix.from_array(v.reshape(rows, cols, order="F"))


def trace(a: BitMatrix) -> int:
    if a.rows != a.cols:
        raise DimensionError(f"trace of non-square {a.shape}")
    return int(np.trace(a.to_array().astype(np.int64)) & 1)


def frobenius_ip(a: BitMatrix, b: BitMatrix) -> int:
    """``sum_ij a_ij * b_ij mod 2`` (equivalently ``trace(a^T b)``)."""
    _check_same(a, b, "frobenius_ip")
    return int(np.bitwise_count(a.data & b.data).sum() & 1)


# -- elimination --------------------------------------------------------------


def _basis_insert(basis: list[int], v: int) -> bool:
    # basis is kept sorted by descending value, so leading bits are distinct
    for b in basis:
        v = min(v, v ^ b)
    if v:
        basis.append(v)
        basis.sort(reverse=True)
        return True
    return False


def rank(m: BitMatrix) -> int:
    """Dimension of the row space. The input is not modified."""
    basis: list[int] = []
    for row in m.to_ints():
        _basis_insert(basis, row)
    return len(basis)


def rank_at_most(m: BitMatrix, bound: int) -> bool:
    """``rank(m) <= bound``, stopping as soon as ``bound + 1`` pivots appear."""
    if bound >= min(m.rows, m.cols):
        return True
    basis: list[int] = []
    for row in m.to_ints():
        if _basis_insert(basis, row) and len(basis) > bound:
            return False
    return True


def _rref_ints(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    rows = list(rows)
    pivots: list[int] = []
    pr = 0
    m = len(rows)
    for c in range(ncols):
        if pr == m:
            break
        bit = 1 << c
        for i in range(pr, m):
            if rows[i] & bit:
                break
        else:
            continue
        rows[pr], rows[i] = rows[i], rows[pr]
        p = rows[pr]
        for j in range(m):
            if j != pr and rows[j] & bit:
                rows[j] ^= p
        pivots.append(c)
        pr += 1
    return rows, pivots


def rref(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form (pivot = lowest column index) and pivot columns."""
    rows, pivots = _rref_ints(m.to_ints(), m.cols)
    return BitMatrix.from_ints(rows, m.cols), pivots


def _kernel_from_rref(rows: list[int], pivots: list[int], ncols: int) -> list[int]:
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = 1 << f
        for r, p in zip(rows, pivots):
            if (r >> f) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Basis of ``{v : m v = 0}`` as the rows of a ``(cols - rank) x cols`` matrix.

    The basis is canonical: one vector per free column of the RREF, with a
    single 1 among the free coordinates.
    """
    rows, pivots = _rref_ints(m.to_ints(), m.cols)
    return BitMatrix.from_ints(_kernel_from_rref(rows, pivots, m.cols), m.cols)


def _ints_to_bits(value: int, n: int) -> np.ndarray:
    return np.array([(value >> i) & 1 for i in range(n)], dtype=np.uint8)


def _bits_to_int(v) -> int:
    out = 0
    for i, b in enumerate(np.asarray(v, dtype=np.uint8).reshape(-1)):
        if b & 1:
            out |= 1 << i
    return out


def solve_affine(m: BitMatrix, b) -> tuple[np.ndarray, BitMatrix] | None:
    """Full solution set of ``m x = b``: ``(particular, kernel_basis)`` or ``None``."""
    b = np.asarray(b, dtype=np.uint8).reshape(-1)
    if b.size != m.rows:
        raise DimensionError(f"solve: rhs of length {b.size} for {m.rows} rows")
    n = m.cols
    aug = [row | (int(bit & 1) << n) for row, bit in zip(m.to_ints(), b)]
    rows, pivots = _rref_ints(aug, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = 0
    for r, p in zip(rows, pivots):
        if (r >> n) & 1:
            x |= 1 << p
    mask = (1 << n) - 1
    kern = _kernel_from_rref([r & mask for r in rows], pivots, n)
    return _ints_to_bits(x, n), BitMatrix.from_ints(kern, n)


def solve(m: BitMatrix, b) -> np.ndarray | None:
    """Some ``x`` with ``m x = b``, or ``None`` if the system is inconsistent."""
    res = solve_affine(m, b)
    return None if res is None else res[0]


# -- sampling -----------------------------------------------------------------


def sample_uniform(rng: Rng, rows: int, cols: int) -> BitMatrix:
    if rows < 1 or cols < 1:
        raise DimensionError(f"sample_uniform needs positive dims, got {rows}x{cols}")
    # BitMatrix masks the padding bits
    return BitMatrix(rows, cols, rng.words((rows, _nwords(cols))))


@lru_cache(maxsize=None)
def count_rank_exact(n: int, rho: int, m: int | None = None) -> int:
    """Number of ``n x m`` F2 matrices (default square) of rank exactly ``rho``.

    ``prod_{i<rho}(2^n - 2^i)(2^m - 2^i) / prod_{i<rho}(2^rho - 2^i)``.
    """
    m = n if m is None else m
    if rho < 0 or rho > min(n, m):
        return 0
    num = 1
    den = 1
    for i in range(rho):
        num *= (2**n - 2**i) * (2**m - 2**i)
        den *= 2**rho - 2**i
    return num // den


@lru_cache(maxsize=None)
def _rank_weights(n: int, r: int, m: int) -> tuple[int, ...]:
    acc = 0
    cum = []
    for rho in range(min(r, n, m) + 1):
        acc += count_rank_exact(n, rho, m)
        cum.append(acc)
    return tuple(cum)


def sample_full_column_rank(rng: Rng, rows: int, cols: int) -> BitMatrix:
    """Uniform ``rows x cols`` matrix of rank ``cols`` (rejection sampling)."""
    if cols > rows:
        raise DimensionError(f"no {rows}x{cols} matrix has full column rank")
    while True:
        x = sample_uniform(rng, rows, cols)
        if rank(x) == cols:
            return x


def sample_rank_exact(rng: Rng, n: int, rho: int, m: int | None = None) -> BitMatrix:
    """Uniform ``n x m`` matrix of rank exactly ``rho``.

    Draws ``X`` (n x rho, full column rank) and ``W`` (rho x m, full row rank)
    and returns ``X W``; every rank-rho matrix has the same number of such
    factorizations, so the output is uniform.
    """
    m = n if m is None else m
    if rho < 0 or rho > min(n, m):
        raise DimensionError(f"rank {rho} impossible for {n}x{m}")
    if rho == 0:
        return BitMatrix.zeros(n, m)
    x = sample_full_column_rank(rng, n, rho)
    w = transpose(sample_full_column_rank(rng, m, rho))
    return mul(x, w)


def sample_rank_value(rng: Rng, n: int, r: int, m: int | None = None) -> int:
    """Draw ``rho`` in ``0..r`` with probability proportional to ``count_rank_exact``."""
    m = n if m is None else m
    cum = _rank_weights(n, r, m)
    u = rng.randbelow(cum[-1])
    for rho, c in enumerate(cum):
        if u < c:
            return rho
    raise AssertionError("unreachable")


def sample_rank_at_most(rng: Rng, n: int, r: int, m: int | None = None) -> BitMatrix:
    """Uniform sample from ``{E in F2^{n x m} : rank(E) <= r}``."""
    if r < 0:
        raise DimensionError("rank bound must be non-negative")
    return sample_rank_exact(rng, n, sample_rank_value(rng, n, r, m), m)


def iter_rank_exact(n: int, rho: int, m: int | None = None) -> Iterator[BitMatrix]:
    """Enumerate every ``n x m`` matrix of rank ``rho`` exactly once.

    Each such matrix factors uniquely as ``U W`` with ``W`` the RREF basis of
    its row space and ``U`` of full column rank; both factors are enumerated.
    """
    from itertools import combinations, product

    m = n if m is None else m
    if rho == 0:
        yield BitMatrix.zeros(n, m)
        return
    lefts = [u for u in (BitMatrix.from_ints(list(bits), rho) for bits in product(range(1 << rho), repeat=n))
             if rank(u) == rho]
    for piv in combinations(range(m), rho):
        free = [(i, c) for i, p in enumerate(piv) for c in range(p + 1, m) if c not in piv]
        for fill in product((0, 1), repeat=len(free)):
            w = np.zeros((rho, m), dtype=np.uint8)
            for i, p in enumerate(piv):
                w[i, p] = 1
            for (i, c), bit in zip(free, fill):
                w[i, c] = bit
            wm = BitMatrix.from_array(w)
            for u in lefts:
                yield mul(u, wm)


def batch_rank(mats: np.ndarray) -> np.ndarray:
    """Ranks of a stack of 0/1 matrices, shape ``(N, rows, cols)``.

    Gaussian elimination vectorized over the batch; used by Monte-Carlo code
    that needs many small ranks at once.
    """
    a = (np.asarray(mats, dtype=np.uint8) & 1).copy()
    if a.ndim != 3:
        raise DimensionError("batch_rank expects an (N, rows, cols) array")
    count, rows, cols = a.shape
    ranks = np.zeros(count, dtype=np.int64)
    idx = np.arange(count)
    for c in range(cols):
        # pivot row = first row at or below the current rank with a 1 in column c
        below = np.arange(rows)[None, :] >= ranks[:, None]
        cand = (a[:, :, c] == 1) & below
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        sel = idx[has]
        pr, tr = piv[has], ranks[has]
        prow = a[sel, pr].copy()
        a[sel, pr] = a[sel, tr]
        a[sel, tr] = prow
        clear = a[sel, :, c].astype(bool)
        clear[np.arange(sel.size), tr] = False
        a[sel] ^= clear[:, :, None] & prow[:, None, :].astype(bool)
        ranks[has] += 1
    return ranks
