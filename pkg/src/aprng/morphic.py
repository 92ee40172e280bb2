"""Morphisms and their fixed points.

A morphism phi on 0..d-1 is given by its images phi(0), ..., phi(d-1).  When
phi is prolongable on a letter a (phi(a) starts with a and is longer than one
letter), iterating phi on a converges to an infinite fixed point u.

Generation strategy: pick the largest power k with max_b |phi^k(b)| <= a byte
cap, precompute the phi^k images once, and emit u as

    u = psi(a) . psi(v) . psi^2(v) . psi^3(v) ...        psi = phi^k,
                                                         psi(a) = a.v

by depth-first expansion.  The walk keeps one stack frame per expansion level,
so memory is O(log position) while letters leave in whole precomputed blocks.
Random access descends the same tree greedily using exact image lengths from
powers of the adjacency matrix, skipping whole subtrees.
"""
from __future__ import annotations

import numpy as np

from .errors import AlphabetError
from .streams import WordStream
from .words import MAX_ALPHABET, as_word, word_to_text

DEFAULT_BLOCK_CAP = 4096


class Morphism:
    """Letter-to-word substitution over 0..d-1, d inferred from the rule count."""

    def __init__(self, images):
        imgs = tuple(as_word(im) for im in images)
        d = len(imgs)
        if not 1 <= d <= MAX_ALPHABET:
            raise AlphabetError(f"alphabet size {d} not in 1..{MAX_ALPHABET}")
        for a, im in enumerate(imgs):
            if not im:
                raise ValueError(f"empty image for letter {a}: morphism must be nonerasing")
            if max(im) >= d:
                raise AlphabetError(
                    f"image of {a} uses letter {max(im)} outside alphabet of size {d}")
        self.images = imgs
        self.alphabet_size = d

    @classmethod
    def from_text(cls, text: str) -> "Morphism":
        """Parse the rule format ``0->01,1->0``."""
        from .specs import parse_morphism_rules
        return cls(parse_morphism_rules(text))

    def to_text(self) -> str:
        return ",".join(f"{a}->{word_to_text(im)}" for a, im in enumerate(self.images))

    def apply(self, w) -> bytes:
        wb = as_word(w, self.alphabet_size)
        return b"".join(self.images[a] for a in wb)

    def is_prolongable(self, a: int) -> bool:
        im = self.images[a]
        return len(im) >= 2 and im[0] == a

    def adjacency_matrix(self) -> np.ndarray:
        """Matrix M with M[i][j] = occurrences of letter i in the image of j,
        so parikh(phi(w)) = M @ parikh(w)."""
        d = self.alphabet_size
        m = np.zeros((d, d), dtype=np.int64)
        for j, im in enumerate(self.images):
            m[:, j] = np.bincount(np.frombuffer(im, dtype=np.uint8), minlength=d)
        return m

    def determinant(self) -> int:
        """Exact integer determinant of the adjacency matrix (Bareiss)."""
        m = [[int(x) for x in row] for row in self.adjacency_matrix()]
        d = len(m)
        sign = 1
        prev = 1
        for k in range(d - 1):
            if m[k][k] == 0:
                for r in range(k + 1, d):
                    if m[r][k] != 0:
                        m[k], m[r] = m[r], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, d):
                for j in range(k + 1, d):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[d - 1][d - 1]

    def __eq__(self, other):
        return isinstance(other, Morphism) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Morphism({self.to_text()!r})"


def iterate_fixed_point(phi: Morphism, seed: int, min_len: int) -> bytes:
    """Prefix of the fixed point by plain repeated application (test oracle)."""
    if not phi.is_prolongable(seed):
        raise ValueError(f"morphism is not prolongable on letter {seed}")
    w = bytes([seed])
    while len(w) < min_len:
        w = phi.apply(w)
    return w


class FixedPointStream(WordStream):
    """Streaming fixed point of a prolongable morphism.

    ``block_cap`` bounds the byte size of the precomputed psi = phi^k images;
    the constructor picks the largest such k.  Forcing ``block_cap`` to
    max |phi(b)| degrades psi to phi itself, which is the one-letter-per-step
    baseline the benchmark compares against.
    """

    def __init__(self, morphism: Morphism, seed: int = 0,
                 block_cap: int = DEFAULT_BLOCK_CAP):
        super().__init__(morphism.alphabet_size)
        if not 0 <= seed < morphism.alphabet_size:
            raise AlphabetError(
                f"seed letter {seed} outside alphabet of "
                f"{morphism.alphabet_size} letters")
        if not morphism.is_prolongable(seed):
            raise ValueError(f"morphism is not prolongable on letter {seed}")
        if block_cap < max(len(im) for im in morphism.images):
            raise ValueError(
                f"block_cap {block_cap} below the largest single image; no power fits")
        self.morphism = morphism
        self.seed = seed
        self.block_cap = block_cap
        self.power, self._blocks = self._choose_power(morphism, block_cap)
        self._views = [np.frombuffer(b, dtype=np.uint8) for b in self._blocks]
        self._counts = [
            tuple(int(c) for c in np.bincount(np.frombuffer(b, np.uint8), minlength=self._d))
            for b in self._blocks]
        # lengths/Parikh vectors of psi^level(b), extended on demand; level 0 = b itself
        self._lens: list[list[int]] = [[1] * self._d, [len(b) for b in self._blocks]]
        self._pvecs: list[list[tuple[int, ...]]] = [
            [tuple(int(i == b) for i in range(self._d)) for b in range(self._d)],
            list(self._counts)]
        head = self._blocks[seed]          # psi(a) = a . v
        self._head = head
        self._head_view = np.frombuffer(head, dtype=np.uint8)
        self._tail = head[1:]
        self.max_stack_depth = 0
        self._rewind(0)

    @staticmethod
    def _choose_power(phi: Morphism, cap: int):
        blocks = list(phi.images)
        power = 1
        while True:
            nxt = [b"".join(blocks[c] for c in phi.images[a])
                   for a in range(phi.alphabet_size)]
            if max(len(b) for b in nxt) > cap:
                return power, blocks
            blocks = nxt
            power += 1

    # -- expansion-tree bookkeeping -------------------------------------
    #
    # A frame [word, idx, level] stands for the unemitted remainder of
    # psi^level(word): each letter word[idx:] still expands through `level`
    # applications of psi.  Frames with level 1 hand their letters' blocks
    # straight to the leaf cursor.

    def _ensure_level(self, level: int) -> None:
        while len(self._lens) <= level:
            prev_l = self._lens[-1]
            prev_p = self._pvecs[-1]
            lens = []
            pvecs = []
            for b in range(self._d):
                total = 0
                vec = [0] * self._d
                for c, mult in enumerate(self._counts[b]):
                    if mult:
                        total += mult * prev_l[c]
                        pc = prev_p[c]
                        for i in range(self._d):
                            vec[i] += mult * pc[i]
                lens.append(total)
                pvecs.append(tuple(vec))
            self._lens.append(lens)
            self._pvecs.append(pvecs)

    def _term_len(self, k: int) -> int:
        """|psi^k(v)| where psi(a) = a.v."""
        self._ensure_level(k)
        lens = self._lens[k]
        return sum(lens[c] for c in self._tail)

    def _rewind(self, pos: int) -> None:
        head = self._head
        if pos < len(head):
            self._leaf = [self._head_view, pos]
            self._stack = []
            self._next_k = 1
            return
        rest = pos - len(head)
        k = 1
        while True:
            tl = self._term_len(k)
            if rest < tl:
                break
            rest -= tl
            k += 1
        stack: list[list] = []
        word, level = self._tail, k
        while True:
            lens = self._lens[level]
            idx = 0
            while rest >= lens[word[idx]]:
                rest -= lens[word[idx]]
                idx += 1
            c = word[idx]
            stack.append([word, idx + 1, level])
            if level == 1:
                self._leaf = [self._views[c], rest]
                break
            word, level = self._blocks[c], level - 1
        self._stack = stack
        self._next_k = k + 1

    def _advance_leaf(self) -> None:
        """Refill the leaf cursor from the stack (extending the outer sum)."""
        stack = self._stack
        while True:
            if not stack:
                stack.append([self._tail, 0, self._next_k])
                self._next_k += 1
                self._ensure_level(self._next_k)
                if len(stack) > self.max_stack_depth:
                    self.max_stack_depth = len(stack)
            frame = stack[-1]
            word, idx, level = frame
            if idx >= len(word):
                stack.pop()
                continue
            frame[1] = idx + 1
            c = word[idx]
            if level == 1:
                self._leaf = [self._views[c], 0]
                return
            stack.append([self._blocks[c], 0, level - 1])
            if len(stack) > self.max_stack_depth:
                self.max_stack_depth = len(stack)

    def _produce(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.uint8)
        filled = 0
        leaf = self._leaf
        while filled < n:
            view, off = leaf
            avail = view.size - off
            if avail == 0:
                self._advance_leaf()
                leaf = self._leaf
                continue
            step = avail if avail < n - filled else n - filled
            out[filled:filled + step] = view[off:off + step]
            leaf[1] = off + step
            filled += step
        return out

    def skip(self, n: int) -> None:
        """Advance without copying letters out (still walks every block)."""
        left = n
        leaf = self._leaf
        while left > 0:
            view, off = leaf
            avail = view.size - off
            if avail == 0:
                self._advance_leaf()
                leaf = self._leaf
                continue
            step = avail if avail < left else left
            leaf[1] = off + step
            left -= step
        self._pos += n

    def prefix_parikh(self, n: int) -> tuple[int, ...]:
        """Exact letter counts of the first n letters, via adjacency powers."""
        if n < 0:
            raise ValueError("n must be >= 0")
        head = self._head
        counts = [0] * self._d
        if n <= len(head):
            for b in head[:n]:
                counts[b] += 1
            return tuple(counts)
        for b in head:
            counts[b] += 1
        rest = n - len(head)
        k = 1
        while True:
            tl = self._term_len(k)
            if rest < tl:
                break
            pv = self._pvecs[k]
            for c in self._tail:
                vec = pv[c]
                for i in range(self._d):
                    counts[i] += vec[i]
            rest -= tl
            k += 1
        word, level = self._tail, k
        while rest > 0:
            lens = self._lens[level]
            pv = self._pvecs[level]
            idx = 0
            while rest >= lens[word[idx]]:
                vec = pv[word[idx]]
                for i in range(self._d):
                    counts[i] += vec[i]
                rest -= lens[word[idx]]
                idx += 1
            if level == 1:
                for b in self._blocks[word[idx]][:rest]:
                    counts[b] += 1
                break
            word, level = self._blocks[word[idx]], level - 1
        return tuple(counts)

    def fork(self) -> "FixedPointStream":
        return FixedPointStream(self.morphism, self.seed, self.block_cap)

    def __repr__(self):
        return (f"FixedPointStream({self.morphism.to_text()!r}, seed={self.seed}, "
                f"power={self.power})")


def fixed_point_stream(phi: Morphism, seed: int = 0,
                       block_cap: int = DEFAULT_BLOCK_CAP) -> FixedPointStream:
    return FixedPointStream(phi, seed, block_cap)


def naive_stream(phi: Morphism, seed: int = 0) -> FixedPointStream:
    """One-letter-per-step expansion of phi itself (benchmark baseline)."""
    return FixedPointStream(phi, seed, block_cap=max(len(im) for im in phi.images))


class MergedStream(WordStream):
    """Letter-to-letter projection of another stream.

    ``mapping[a]`` is the output letter for input letter a; the map must be
    surjective onto 0..d'-1 so every output letter actually occurs.
    """

    def __init__(self, inner: WordStream, mapping):
        table = tuple(int(x) for x in mapping)
        if len(table) != inner.alphabet_size:
            raise AlphabetError(
                f"mapping covers {len(table)} letters, stream has {inner.alphabet_size}")
        if min(table) < 0:
            raise AlphabetError("mapped letters must be >= 0")
        d_out = max(table) + 1
        if set(table) != set(range(d_out)):
            raise AlphabetError(f"mapping is not surjective onto 0..{d_out - 1}")
        super().__init__(d_out)
        self._inner = inner.fork()
        self._table = np.array(table, dtype=np.uint8)
        self.mapping = table

    def _produce(self, n: int) -> np.ndarray:
        return self._table[self._inner.take(n)]

    def _rewind(self, pos: int) -> None:
        self._inner.seek(pos)

    def fork(self) -> "MergedStream":
        return MergedStream(self._inner, self.mapping)

    def prefix_parikh(self, n: int) -> tuple[int, ...]:
        counts = [0] * self._d
        for a, c in enumerate(self._inner.prefix_parikh(n)):
            counts[self.mapping[a]] += c
        return tuple(counts)

    def __repr__(self):
        return f"MergedStream({self._inner!r}, {self.mapping})"


def merge_letters(u: WordStream, mapping) -> MergedStream:
    return MergedStream(u, mapping)


class InterleavedStream(WordStream):
    """u_0 c u_1 c u_2 c ... for a fresh letter c extending the alphabet."""

    def __init__(self, inner: WordStream, c: int):
        if c != inner.alphabet_size:
            raise AlphabetError(
                f"interleaved letter must be {inner.alphabet_size} "
                f"(one past the current alphabet), got {c}")
        super().__init__(inner.alphabet_size + 1)
        self._inner = inner.fork()
        self._c = c

    def _produce(self, n: int) -> np.ndarray:
        start = self._pos
        out = np.full(n, self._c, dtype=np.uint8)
        # even absolute positions carry inner letters
        first_even = start + (start & 1)
        n_inner = (start + n + 1) // 2 - (start + 1) // 2
        if n_inner:
            out[first_even - start::2] = self._inner.take(n_inner)
        return out

    def _rewind(self, pos: int) -> None:
        self._inner.seek((pos + 1) // 2)

    def fork(self) -> "InterleavedStream":
        return InterleavedStream(self._inner, self._c)

    def prefix_parikh(self, n: int) -> tuple[int, ...]:
        inner = self._inner.prefix_parikh((n + 1) // 2)
        return tuple(inner) + (n // 2,)

    def __repr__(self):
        return f"InterleavedStream({self._inner!r}, {self._c})"


def interleave_letter(u: WordStream, c: int) -> InterleavedStream:
    return InterleavedStream(u, c)


FIBONACCI = Morphism(["01", "0"])
TRIBONACCI = Morphism(["01", "02", "0"])
THUE_MORSE = Morphism(["01", "10"])


def fibonacci_stream(block_cap: int = DEFAULT_BLOCK_CAP) -> FixedPointStream:
    return FixedPointStream(FIBONACCI, 0, block_cap)


def tribonacci_stream(block_cap: int = DEFAULT_BLOCK_CAP) -> FixedPointStream:
    return FixedPointStream(TRIBONACCI, 0, block_cap)
