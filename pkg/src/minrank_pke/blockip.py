"""The t-block-wise inner product and sampling from its dual space.

For ``n x n`` matrices split into a ``t x t`` grid of ``b x b`` blocks
(``b = n / t``), ``block_ip(A, B)[i, j]`` is the Frobenius inner product of
block ``(i, j)`` of ``A`` with block ``(i, j)`` of ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import f2mat
from .errors import DimensionError, ParamError
from .f2mat import BitMatrix, MatrixTuple
from .rng import Rng


@dataclass(frozen=True)
class BlockIpContext:
    n: int
    t: int

    def __post_init__(self):
        if self.t < 1 or self.n < 1:
            raise ParamError(f"n and t must be positive (n={self.n}, t={self.t})")
        if self.n % self.t:
            raise ParamError(f"t must divide n (n={self.n}, t={self.t})")

    @property
    def b(self) -> int:
        return self.n // self.t

    def check(self, m: BitMatrix) -> None:
        if m.shape != (self.n, self.n):
            raise DimensionError(f"expected {self.n}x{self.n}, got {m.rows}x{m.cols}")


def _blocks(ctx: BlockIpContext, a: np.ndarray) -> np.ndarray:
    # (t, b, t, b) -> (t, t, b, b): blocks[i, j] is block (i, j)
    t, b = ctx.t, ctx.b
    return a.reshape(t, b, t, b).transpose(0, 2, 1, 3)


def _block_ip_bits(ctx: BlockIpContext, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    prod = (a & b).reshape(ctx.t, ctx.b, ctx.t, ctx.b)
    return (prod.sum(axis=(1, 3), dtype=np.int64) & 1).astype(np.uint8)


def block_ip(ctx: BlockIpContext, a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """``<A, B>_t`` computed block by block in O(n^2) bit operations."""
    ctx.check(a)
    ctx.check(b)
    return BitMatrix.from_array(_block_ip_bits(ctx, a.to_array(), b.to_array()))


def block_ip_tuple(ctx: BlockIpContext, mats, b: BitMatrix) -> list[BitMatrix]:
    """``(<A_1, B>_t, ..., <A_k, B>_t)``; ``B`` is unpacked once."""
    ctx.check(b)
    bb = b.to_array()
    out = []
    for a in mats:
        ctx.check(a)
        out.append(BitMatrix.from_array(_block_ip_bits(ctx, a.to_array(), bb)))
    return out


@dataclass(frozen=True)
class SelectorMatrix:
    """``P`` with rows ``vec(E_ii (x) I_b)^T``, so that ``<A,B>_t = P (A (x) B) P^T``."""

    ctx: BlockIpContext
    P: BitMatrix

    def apply(self, a: BitMatrix, b: BitMatrix) -> BitMatrix:
        k = f2mat.kron(a, b)
        return f2mat.mul(f2mat.mul(self.P, k), f2mat.transpose(self.P))


def build_selector(ctx: BlockIpContext) -> SelectorMatrix:
    n2 = ctx.n * ctx.n
    if n2 > f2mat.MAX_DIM:
        raise DimensionError(f"selector needs n^2={n2} columns, above MAX_DIM")
    eye_b = BitMatrix.identity(ctx.b)
    rows = []
    for i in range(ctx.t):
        e_ii = np.zeros((ctx.t, ctx.t), dtype=np.uint8)
        e_ii[i, i] = 1
        rows.append(f2mat.vec(f2mat.kron(BitMatrix.from_array(e_ii), eye_b)))
    return SelectorMatrix(ctx, BitMatrix.from_array(np.array(rows)))


@dataclass(frozen=True)
class BlockKernels:
    """Per-block kernels of the constraint ``<A_z, H>_t = 0`` for all ``z``.

    ``bases[i][j]`` is a ``dim x b^2`` matrix whose rows, read as
    ``vec(H^{ij})``, span the admissible values of block ``(i, j)``.
    """

    ctx: BlockIpContext
    bases: tuple[tuple[BitMatrix, ...], ...]

    def dims(self) -> np.ndarray:
        return np.array([[m.rows for m in row] for row in self.bases])

    def dimension(self) -> int:
        return int(self.dims().sum())


def dual_space_block_kernels(ctx: BlockIpContext, mats: MatrixTuple) -> BlockKernels:
    """Kernels that define ``A^{perp_t} = {H : <A_z, H>_t = 0 for every z}``.

    Entry ``(i, j)`` of ``<A_z, H>_t`` only involves block ``(i, j)``, so the
    constraint system splits into ``t^2`` independent ``k x b^2`` systems with
    rows ``vec(A_z^{ij})^T``.
    """
    t, b = ctx.t, ctx.b
    if len(mats):
        if mats.shape != (ctx.n, ctx.n):
            raise DimensionError(f"tuple shape {mats.shape} does not match n={ctx.n}")
        # (k, t, t, b*b) with column-stacked block vectors
        stack = np.stack([_blocks(ctx, m.to_array()) for m in mats])
        vecs = stack.transpose(0, 1, 2, 4, 3).reshape(len(mats), t, t, b * b)
    bases = []
    for i in range(t):
        row = []
        for j in range(t):
            if len(mats):
                cons = BitMatrix.from_array(vecs[:, i, j, :])
            else:
                cons = BitMatrix.zeros(1, b * b)
            row.append(f2mat.kernel_basis(cons))
        bases.append(tuple(row))
    return BlockKernels(ctx, tuple(bases))


def sample_dual(ctx: BlockIpContext, kernels: BlockKernels, rng: Rng) -> BitMatrix:
    """Uniform ``H`` in ``A^{perp_t}``: each block an independent uniform kernel vector."""
    t, b = ctx.t, ctx.b
    out = np.zeros((t, t, b, b), dtype=np.uint8)
    for i in range(t):
        for j in range(t):
            basis = kernels.bases[i][j]
            if basis.rows == 0:
                continue
            coeffs = rng.bits(basis.rows).astype(np.int64)
            v = (coeffs @ basis.to_array().astype(np.int64)) & 1
            out[i, j] = v.reshape(b, b, order="F")
    return BitMatrix.from_array(out.transpose(0, 2, 1, 3).reshape(ctx.n, ctx.n))


def monolithic_dual_basis(ctx: BlockIpContext, mats: MatrixTuple) -> BitMatrix:
    """Kernel of the full ``k t^2 x n^2`` constraint system, rows are ``vec(H)``.

    Reference construction that ignores the block structure; only meant for
    cross-checking :func:`dual_space_block_kernels` at small ``n``.
    """
    n, t, b = ctx.n, ctx.t, ctx.b
    rows = []
    for m in mats:
        a = m.to_array()
        for i in range(t):
            for j in range(t):
                mask = np.zeros((n, n), dtype=np.uint8)
                mask[i * b:(i + 1) * b, j * b:(j + 1) * b] = a[i * b:(i + 1) * b, j * b:(j + 1) * b]
                rows.append(mask.reshape(-1, order="F"))
    if not rows:
        rows.append(np.zeros(n * n, dtype=np.uint8))
    return f2mat.kernel_basis(BitMatrix.from_array(np.array(rows)))
