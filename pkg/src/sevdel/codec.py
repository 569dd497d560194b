"""File <-> sector-matrix codec.

A file is split into n blocks of s sectors each; a sector is the
little-endian value of its 1, 2 or 4 bytes.  Sector values are therefore
bounded by 2^sector_bits, which is what keeps lifted-ElGamal decryption
(a bounded discrete log) feasible.  The tail block is zero-padded and the
manifest records the true byte length so joining is exact.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass

from .errors import DimensionMismatch, EmptyFile

_SECTOR_FMT = {8: "B", 16: "H", 32: "I"}


@dataclass(frozen=True)
class FileManifest:
    """Identity and shape of one outsourced file."""

    file_id: bytes
    n: int
    s: int
    sector_bits: int
    original_len: int

    def __post_init__(self):
        if self.n < 1 or self.s < 1:
            raise DimensionMismatch("manifest requires n >= 1 and s >= 1")
        if self.sector_bits not in _SECTOR_FMT:
            raise DimensionMismatch("sector_bits must be one of 8, 16, 32")
        if self.n * self.s * (self.sector_bits // 8) < self.original_len:
            raise DimensionMismatch("matrix capacity below original length")

    @property
    def sector_bytes(self) -> int:
        return self.sector_bits // 8

    @property
    def block_bytes(self) -> int:
        return self.s * self.sector_bytes

    def to_json(self) -> str:
        return json.dumps(
            {
                "file_id": self.file_id.hex(),
                "n": self.n,
                "s": self.s,
                "sector_bits": self.sector_bits,
                "original_len": self.original_len,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "FileManifest":
        d = json.loads(text)
        return cls(
            file_id=bytes.fromhex(d["file_id"]),
            n=int(d["n"]),
            s=int(d["s"]),
            sector_bits=int(d["sector_bits"]),
            original_len=int(d["original_len"]),
        )


@dataclass
class BlockMatrix:
    """n x s sector values; rows[i][j] is block i+1, sector j+1."""

    rows: list[list[int]]

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def s(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def check_shape(self, manifest: FileManifest) -> None:
        if self.n != manifest.n:
            raise DimensionMismatch(f"block count {self.n} != manifest n {manifest.n}")
        for row in self.rows:
            if len(row) != manifest.s:
                raise DimensionMismatch("ragged block matrix")


def file_identity(content: bytes, owner_id: bytes = b"", file_name: bytes = b"") -> bytes:
    """I_M: digest binding owner, name and content digest of the file."""
    h = hashlib.sha256()
    h.update(b"sevdel/file-id:")
    h.update(len(owner_id).to_bytes(4, "big") + owner_id)
    h.update(len(file_name).to_bytes(4, "big") + file_name)
    h.update(hashlib.sha256(content).digest())
    return h.digest()


def split(
    data: bytes,
    s: int,
    sector_bits: int,
    owner_id: bytes = b"",
    file_name: bytes = b"",
) -> tuple[FileManifest, BlockMatrix]:
    """Split a byte string into its n x s sector matrix.

    n = ceil(len / (s * sector_bits/8)); the final block is zero-padded.
    """
    if sector_bits not in _SECTOR_FMT:
        raise ValueError("sector_bits must be one of 8, 16, 32")
    if s < 1:
        raise ValueError("s must be >= 1")
    if len(data) == 0:
        raise EmptyFile("cannot split an empty file")
    block_bytes = s * (sector_bits // 8)
    n = -(-len(data) // block_bytes)
    padded = data + b"\x00" * (n * block_bytes - len(data))
    fmt = "<%d%s" % (s, _SECTOR_FMT[sector_bits])
    rows = [
        list(struct.unpack_from(fmt, padded, i * block_bytes))
        for i in range(n)
    ]
    manifest = FileManifest(
        file_id=file_identity(data, owner_id, file_name),
        n=n,
        s=s,
        sector_bits=sector_bits,
        original_len=len(data),
    )
    return manifest, BlockMatrix(rows)


def join(manifest: FileManifest, blocks: BlockMatrix) -> bytes:
    """Inverse of split: exact original bytes, truncated at original_len."""
    blocks.check_shape(manifest)
    fmt = "<%d%s" % (manifest.s, _SECTOR_FMT[manifest.sector_bits])
    bound = 1 << manifest.sector_bits
    out = bytearray(manifest.n * manifest.block_bytes)
    for i, row in enumerate(blocks.rows):
        for v in row:
            if not 0 <= v < bound:
                raise DimensionMismatch(f"sector value {v} exceeds 2^{manifest.sector_bits}")
        struct.pack_into(fmt, out, i * manifest.block_bytes, *row)
    return bytes(out[: manifest.original_len])
