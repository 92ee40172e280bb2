"""Uniform interface over infinite words.

A WordStream yields letters of a fixed infinite word over 0..d-1.  Concrete
streams implement block production and absolute repositioning; the base class
provides skipping, single-letter reads, prefix materialization and an exact
Parikh-of-prefix fallback.  Streams are single-cursor objects: fork() hands
out an independent stream of the same word positioned at 0.
"""
from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from .errors import AlphabetError
from .words import MAX_ALPHABET, PrefixBuffer, as_word

_CHUNK = 1 << 16


class WordStream(ABC):
    def __init__(self, alphabet_size: int):
        if not 1 <= alphabet_size <= MAX_ALPHABET:
            raise AlphabetError(f"alphabet size {alphabet_size} not in 1..{MAX_ALPHABET}")
        self._d = alphabet_size
        self._pos = 0

    @property
    def alphabet_size(self) -> int:
        return self._d

    @property
    def position(self) -> int:
        """Index of the next letter this stream will emit."""
        return self._pos

    @abstractmethod
    def _produce(self, n: int) -> np.ndarray:
        """Next n letters from the current cursor as a uint8 array."""

    @abstractmethod
    def _rewind(self, pos: int) -> None:
        """Move the production cursor to absolute position pos."""

    @abstractmethod
    def fork(self) -> "WordStream":
        """Independent stream of the same word, positioned at 0."""

    def take(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("n must be >= 0")
        if n == 0:
            return np.empty(0, dtype=np.uint8)
        out = self._produce(n)
        self._pos += n
        return out

    def skip(self, n: int) -> None:
        while n > 0:
            step = min(n, _CHUNK)
            self.take(step)
            n -= step

    def seek(self, pos: int) -> None:
        if pos < 0:
            raise ValueError("position must be >= 0")
        self._rewind(pos)
        self._pos = pos

    def next_letter(self) -> int:
        return int(self.take(1)[0])

    def letter_at(self, pos: int) -> int:
        """Letter u_pos; leaves the stream positioned to emit u_{pos+1}."""
        self.seek(pos)
        return int(self.take(1)[0])

    def prefix(self, n: int, stride: int = 1024) -> PrefixBuffer:
        """Materialize the first n letters without disturbing this cursor."""
        s = self.fork()
        return PrefixBuffer(s.take(n), self._d, source=repr(self), stride=stride)

    def prefix_parikh(self, n: int) -> tuple[int, ...]:
        """Exact Parikh vector of the first n letters.

        Default counts a fresh fork chunk by chunk; subclasses override with
        closed-form or structural computations where those exist.
        """
        s = self.fork()
        counts = np.zeros(self._d, dtype=object)
        left = n
        while left > 0:
            block = s.take(min(left, 1 << 20))
            counts += np.bincount(block, minlength=self._d)
            left -= block.size
        return tuple(int(c) for c in counts)

    def __iter__(self):
        while True:
            for letter in self.take(_CHUNK):
                yield int(letter)


class CycleStream(WordStream):
    """Periodic repetition of a finite pattern (directives, test words)."""

    def __init__(self, pattern, alphabet_size: int | None = None):
        pat = as_word(pattern, alphabet_size)
        if not pat:
            raise ValueError("pattern must be nonempty")
        d = alphabet_size if alphabet_size is not None else max(pat) + 1
        super().__init__(d)
        self._pat = np.frombuffer(pat, dtype=np.uint8)
        self._pat_bytes = pat

    def _produce(self, n: int) -> np.ndarray:
        L = self._pat.size
        start = self._pos % L
        reps = (start + n + L - 1) // L
        return np.tile(self._pat, reps)[start:start + n]

    def _rewind(self, pos: int) -> None:
        pass  # position alone determines the phase

    def fork(self) -> "CycleStream":
        return CycleStream(self._pat_bytes, self._d)

    def prefix_parikh(self, n: int) -> tuple[int, ...]:
        L = self._pat.size
        full, rem = divmod(n, L)
        counts = np.bincount(self._pat, minlength=self._d).astype(object) * full
        if rem:
            counts += np.bincount(self._pat[:rem], minlength=self._d)
        return tuple(int(c) for c in counts)

    def __repr__(self) -> str:
        return f"CycleStream({self._pat_bytes!r})"


class SliceStream(WordStream):
    """Suffix view u[offset:] of another stream (shift-consistency checks)."""

    def __init__(self, inner: WordStream, offset: int):
        if offset < 0:
            raise ValueError("offset must be >= 0")
        super().__init__(inner.alphabet_size)
        self._inner = inner.fork()
        self._offset = offset
        self._inner.seek(offset)

    def _produce(self, n: int) -> np.ndarray:
        return self._inner.take(n)

    def _rewind(self, pos: int) -> None:
        self._inner.seek(self._offset + pos)

    def fork(self) -> "SliceStream":
        return SliceStream(self._inner, self._offset)

    def __repr__(self) -> str:
        return f"SliceStream({self._inner!r}, {self._offset})"
