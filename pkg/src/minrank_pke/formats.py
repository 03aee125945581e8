"""Binary file formats. All integers little-endian.

========  ==============================================================
``MRNK``  u16 version, u32 n k r t, u8 has_witness, then A_1..A_k, Y,
          and if has_witness: s (1 x k matrix), E
``MRPK``  u16 version, params, then A_1..A_k, Y
``MRSK``  u16 version, params, then s (1 x k matrix)
``MRCT``  u16 version, u32 k, u32 t, then C_1..C_{k+1}
========  ==============================================================

``params`` is u32 n k r t, u32 tau, u8 strict. Matrices use
:meth:`BitMatrix.to_bytes`. Loaders reject unknown versions and trailing bytes.
"""

from __future__ import annotations

import struct

from .errors import FormatError, ParamError
from .f2mat import BitMatrix, MatrixTuple
from .minrank import Params, PlantedInstance, Witness
from .pke import Ciphertext, KeyPair, PublicKey, SecretKey

VERSION = 1

MAGIC_INSTANCE = b"MRNK"
MAGIC_PUBLIC = b"MRPK"
MAGIC_SECRET = b"MRSK"
MAGIC_CIPHERTEXT = b"MRCT"

_PARAMS = struct.Struct("<IIIIIB")


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = bytes(buf)
        self.off = 0

    def unpack(self, fmt: str):
        size = struct.calcsize(fmt)
        if len(self.buf) - self.off < size:
            raise FormatError("truncated header")
        out = struct.unpack_from(fmt, self.buf, self.off)
        self.off += size
        return out

    def matrix(self, shape=None) -> BitMatrix:
        m, self.off = BitMatrix.from_bytes(self.buf, self.off)
        if shape is not None and m.shape != tuple(shape):
            raise FormatError(f"expected a {shape[0]}x{shape[1]} matrix, found {m.rows}x{m.cols}")
        return m

    def header(self, magic: bytes) -> None:
        if self.buf[:4] != magic:
            raise FormatError(f"bad magic {self.buf[:4]!r}, expected {magic!r}")
        self.off = 4
        (version,) = self.unpack("<H")
        if version != VERSION:
            raise FormatError(f"unsupported version {version}")

    def params(self) -> Params:
        n, k, r, t, tau, strict = self.unpack(_PARAMS.format)
        if strict not in (0, 1):
            raise FormatError("strict flag must be 0 or 1")
        try:
            return Params(n, k, r, t, tau=tau, strict=bool(strict))
        except ParamError as exc:
            raise FormatError(f"invalid parameters in file: {exc}") from exc

    def done(self) -> None:
        if self.off != len(self.buf):
            raise FormatError(f"{len(self.buf) - self.off} trailing bytes")


def _params_bytes(p: Params) -> bytes:
    return _PARAMS.pack(p.n, p.k, p.r, p.t, p.tau, int(p.strict))


def _vector_bytes(v) -> bytes:
    return BitMatrix.from_vector(v, column=False).to_bytes()


def dump_instance(inst: PlantedInstance) -> bytes:
    p = inst.params
    out = [MAGIC_INSTANCE, struct.pack("<H", VERSION),
           struct.pack("<IIII", p.n, p.k, p.r, p.t), struct.pack("<B", inst.witness is not None)]
    out += [a.to_bytes() for a in inst.As]
    out.append(inst.Y.to_bytes())
    if inst.witness is not None:
        out.append(_vector_bytes(inst.witness.s))
        out.append(inst.witness.E.to_bytes())
    return b"".join(out)


def load_instance(buf: bytes) -> PlantedInstance:
    rd = _Reader(buf)
    rd.header(MAGIC_INSTANCE)
    n, k, r, t = rd.unpack("<IIII")
    (has_witness,) = rd.unpack("<B")
    if has_witness not in (0, 1):
        raise FormatError("has_witness must be 0 or 1")
    try:
        params = Params(n, k, r, t)
    except ParamError as exc:
        raise FormatError(f"invalid parameters in file: {exc}") from exc
    As = MatrixTuple([rd.matrix((n, n)) for _ in range(k)], (n, n))
    Y = rd.matrix((n, n))
    witness = None
    if has_witness:
        s = rd.matrix((1, k)).row_vector()
        E = rd.matrix((n, n))
        witness = Witness(s, E)
    rd.done()
    return PlantedInstance(params, As, Y, witness)


def dump_public_key(pk: PublicKey) -> bytes:
    body = [a.to_bytes() for a in pk.As] + [pk.Y.to_bytes()]
    return b"".join([MAGIC_PUBLIC, struct.pack("<H", VERSION), _params_bytes(pk.params)] + body)


def load_public_key(buf: bytes) -> PublicKey:
    rd = _Reader(buf)
    rd.header(MAGIC_PUBLIC)
    p = rd.params()
    As = MatrixTuple([rd.matrix((p.n, p.n)) for _ in range(p.k)], (p.n, p.n))
    Y = rd.matrix((p.n, p.n))
    rd.done()
    return PublicKey(p, As, Y)


def dump_secret_key(sk: SecretKey) -> bytes:
    return b"".join([MAGIC_SECRET, struct.pack("<H", VERSION), _params_bytes(sk.params),
                     _vector_bytes(sk.s)])


def load_secret_key(buf: bytes) -> SecretKey:
    rd = _Reader(buf)
    rd.header(MAGIC_SECRET)
    p = rd.params()
    s = rd.matrix((1, p.k)).row_vector()
    rd.done()
    return SecretKey(p, s)


def dump_keypair(kp: KeyPair) -> tuple[bytes, bytes]:
    return dump_public_key(kp.pk), dump_secret_key(kp.sk)


def dump_ciphertext(ct: Ciphertext) -> bytes:
    head = [MAGIC_CIPHERTEXT, struct.pack("<H", VERSION), struct.pack("<II", ct.k, ct.t)]
    return b"".join(head + [c.to_bytes() for c in ct.Cs])


def load_ciphertext(buf: bytes) -> Ciphertext:
    rd = _Reader(buf)
    rd.header(MAGIC_CIPHERTEXT)
    k, t = rd.unpack("<II")
    if k > 1 << 20 or t == 0:
        raise FormatError(f"implausible ciphertext header k={k}, t={t}")
    Cs = tuple(rd.matrix((t, t)) for _ in range(k + 1))
    rd.done()
    return Ciphertext(Cs)
