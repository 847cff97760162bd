"""Word-embedding sets with word2vec-compatible text and binary IO.

Word order as stored in the source file is preserved everywhere: it encodes
descending corpus frequency, which both the top-k vocabulary filter and the
rank-order frequency resource rely on. Vectors are held as float64 in memory
regardless of the on-disk width.

Formats
-------
text    first line ``<vocab_count> <dim>``, then one ``<token> <v1> ... <vd>``
        line per word, space separated.
binary  the same ASCII header terminated by a newline, then per word the
        token bytes, a single space, and ``dim`` little-endian float32
        values. Newlines between records (as some writers emit) are
        tolerated on read and never written.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateWord,
    InvalidValue,
    IoError,
    ParseError,
)

logger = logging.getLogger(__name__)

FORMATS = ("text", "binary")


@dataclass(eq=False)
class EmbeddingSet:
    """An ordered vocabulary with one d-dimensional vector per word."""

    words: list[str]
    vectors: np.ndarray
    source: str = ""
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.words = list(self.words)
        self.vectors = np.ascontiguousarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise InvalidValue(f"vectors must be 2-d, got shape {self.vectors.shape}")
        if len(self.words) != self.vectors.shape[0]:
            raise InvalidValue(
                f"{len(self.words)} words but {self.vectors.shape[0]} vectors"
            )
        if not np.all(np.isfinite(self.vectors)):
            raise InvalidValue("embedding vectors contain non-finite values")
        self._index = {w: i for i, w in enumerate(self.words)}
        if len(self._index) != len(self.words):
            raise DuplicateWord("embedding vocabulary contains duplicate tokens")
        self.vectors.setflags(write=False)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def index_of(self, token: str) -> int:
        return self._index[token]


def load_embeddings(path, fmt: str = "text", max_vocab: int | None = None) -> EmbeddingSet:
    """Read the first ``min(max_vocab, file vocab)`` words in file order."""
    _check_format(fmt)
    if max_vocab is not None and max_vocab < 0:
        raise ValueError(f"max_vocab must be non-negative, got {max_vocab}")
    path = str(path)
    try:
        if fmt == "text":
            with open(path, encoding="utf-8", errors="surrogateescape") as f:
                words, vectors = _read_text(f, path, max_vocab)
        else:
            with open(path, "rb") as f:
                words, vectors = _read_binary(f, path, max_vocab)
    except OSError as exc:
        raise IoError(f"cannot read embeddings from {path}: {exc}") from exc
    logger.info("loaded %d x %d embeddings from %s", len(words), vectors.shape[1], path)
    return EmbeddingSet(words=words, vectors=vectors, source=path)


def save_embeddings(e: EmbeddingSet, path, fmt: str = "text") -> None:
    """Write an embedding set; text round-trips within 1e-6, binary stores
    float32 (exact for values that came from a binary file)."""
    _check_format(fmt)
    path = str(path)
    try:
        if fmt == "text":
            with open(path, "w", encoding="utf-8", errors="surrogateescape") as f:
                f.write(f"{len(e.words)} {e.dim}\n")
                for token, vec in zip(e.words, e.vectors):
                    f.write(token + " " + " ".join("%.6f" % v for v in vec) + "\n")
        else:
            with open(path, "wb") as f:
                f.write(f"{len(e.words)} {e.dim}\n".encode("ascii"))
                for token, vec in zip(e.words, e.vectors):
                    f.write(token.encode("utf-8", "surrogateescape") + b" ")
                    f.write(vec.astype("<f4").tobytes())
    except OSError as exc:
        raise IoError(f"cannot write embeddings to {path}: {exc}") from exc


def top_k_filter(e: EmbeddingSet, k: int = 80000) -> EmbeddingSet:
    """Keep the k most frequent (= first) words, order preserved."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k >= len(e.words):
        return e
    return EmbeddingSet(words=e.words[:k], vectors=e.vectors[:k], source=e.source)


def transform_embeddings(e: EmbeddingSet, q) -> EmbeddingSet:
    """Apply a square transformation to every vector (word w maps to Q e_w).

    ``q`` may be a raw (d, d) array or any object with a ``.q`` attribute
    holding one. Orthogonal q preserves all pairwise distances and cosines.
    """
    mat = np.asarray(getattr(q, "q", q), dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatch(f"transformation must be square, got {mat.shape}")
    if mat.shape[0] != e.dim:
        raise DimensionMismatch(
            f"transformation is {mat.shape[0]}-dimensional but embeddings are {e.dim}-dimensional"
        )
    return EmbeddingSet(words=e.words, vectors=e.vectors @ mat.T, source=e.source)


def normalize_embeddings(e: EmbeddingSet) -> EmbeddingSet:
    """Scale every vector to unit L2 norm (zero vectors are left alone)."""
    norms = np.linalg.norm(e.vectors, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return EmbeddingSet(words=e.words, vectors=e.vectors / norms, source=e.source)


def _check_format(fmt: str) -> None:
    if fmt not in FORMATS:
        raise ValueError(f"unknown embedding format {fmt!r}, expected one of {FORMATS}")


def _parse_header(parts, path, where: str) -> tuple[int, int]:
    if len(parts) != 2:
        raise ParseError(f"{path}:{where}: header must be '<vocab_count> <dim>'")
    try:
        count, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"{path}:{where}: non-integer header fields {parts!r}") from None
    if count < 0 or dim < 1:
        raise ParseError(f"{path}:{where}: invalid header values {count} {dim}")
    return count, dim


def _read_text(f, path: str, max_vocab: int | None):
    header = f.readline()
    if not header.strip():
        raise ParseError(f"{path}:1: missing '<vocab_count> <dim>' header")
    count, dim = _parse_header(header.split(), path, "1")
    limit = count if max_vocab is None else min(count, max_vocab)
    words: list[str] = []
    seen: set[str] = set()
    vectors = np.empty((limit, dim), dtype=np.float64)
    for i in range(limit):
        lineno = i + 2
        line = f.readline()
        if line == "":
            raise ParseError(
                f"{path}:{lineno}: file ends after {i} rows, header declared {count}"
            )
        parts = line.split()
        if len(parts) != dim + 1:
            raise ParseError(
                f"{path}:{lineno}: expected token plus {dim} values, got {len(parts)} fields"
            )
        token = parts[0]
        if token in seen:
            raise DuplicateWord(f"{path}:{lineno}: duplicate token {token!r}")
        seen.add(token)
        try:
            row = [float(v) for v in parts[1:]]
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
        if not all(np.isfinite(row)):
            raise InvalidValue(f"{path}:{lineno}: non-finite value for token {token!r}")
        words.append(token)
        vectors[i] = row
    if limit == count:
        trailing = f.readline()
        if trailing.strip():
            raise ParseError(f"{path}: more rows than the header declares ({count})")
    return words, vectors


def _read_binary(f, path: str, max_vocab: int | None):
    header = f.readline()
    if not header.endswith(b"\n"):
        raise ParseError(f"{path}:offset 0: header line not terminated by newline")
    count, dim = _parse_header(header.split(), path, "offset 0")
    limit = count if max_vocab is None else min(count, max_vocab)
    words: list[str] = []
    seen: set[str] = set()
    vectors = np.empty((limit, dim), dtype=np.float64)
    for i in range(limit):
        token_bytes = _read_token(f, path)
        token = token_bytes.decode("utf-8", "surrogateescape")
        if token in seen:
            raise DuplicateWord(f"{path}:offset {f.tell()}: duplicate token {token!r}")
        seen.add(token)
        buf = f.read(4 * dim)
        if len(buf) < 4 * dim:
            raise ParseError(
                f"{path}:offset {f.tell()}: truncated vector for token {token!r}"
            )
        row = np.frombuffer(buf, dtype="<f4").astype(np.float64)
        if not np.all(np.isfinite(row)):
            raise InvalidValue(f"{path}:offset {f.tell()}: non-finite value for token {token!r}")
        words.append(token)
        vectors[i] = row
    if limit == count and f.read(1) not in (b"", b"\n"):
        raise ParseError(f"{path}: trailing bytes after {count} declared words")
    return words, vectors


def _read_token(f, path: str) -> bytes:
    """Consume bytes up to the next space; newlines before a token (some
    writers put one after each vector) are skipped."""
    token = bytearray()
    while True:
        chunk = f.peek(1)
        if not chunk:
            raise ParseError(f"{path}:offset {f.tell()}: unexpected end of file in token")
        cut_space = chunk.find(b" ")
        cut_nl = chunk.find(b"\n")
        cuts = [c for c in (cut_space, cut_nl) if c >= 0]
        if not cuts:
            token += f.read(len(chunk))
            continue
        cut = min(cuts)
        token += f.read(cut)
        sep = f.read(1)
        if sep == b"\n":
            if token:
                raise ParseError(
                    f"{path}:offset {f.tell()}: newline inside token {bytes(token)!r}"
                )
            continue
        if not token:
            raise ParseError(f"{path}:offset {f.tell()}: empty token")
        return bytes(token)
