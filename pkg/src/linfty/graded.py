"""Graded vector spaces, permutations, shuffles and Koszul signs.

Words in Sym(V) are tuples of basis indices sorted ascending; basis indices
are ordered by (degree, label), so sorting indices is the canonical order.
All word combinatorics use the *working* degrees of the space, i.e. the
degrees after the shift (L[1] for symmetric coalgebras of L-infinity algebras).
"""

from itertools import combinations, combinations_with_replacement, permutations


class Permutation:
    """A bijection of {1..n}, stored as its image list."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(images)}: {images}")
        self.images = images

    def __len__(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i - 1]

    def __mul__(self, other):
        # (self * other)(i) = self(other(i))
        if len(self) != len(other):
            raise ValueError("size mismatch")
        return Permutation([self(other(i)) for i in range(1, len(self) + 1)])

    def inverse(self):
        inv = [0] * len(self)
        for p, v in enumerate(self.images, 1):
            inv[v - 1] = p
        return Permutation(inv)

    def sign(self):
        n = len(self.images)
        inv = sum(1 for p in range(n) for q in range(p + 1, n) if self.images[p] > self.images[q])
        return -1 if inv % 2 else 1

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation{self.images}"

    @classmethod
    def identity(cls, n):
        return cls(range(1, n + 1))


def koszul_sign(sigma, degrees):
    """Koszul sign eps(sigma) for factors x_1..x_n of the given degrees.

    Defined by eps(sigma) x_{sigma(1)} ... x_{sigma(n)} = x_1 ... x_n in Sym:
    every inverted pair contributes (-1)^(product of the two degrees).
    """
    if not isinstance(sigma, Permutation):
        sigma = Permutation(sigma)
    if len(degrees) != len(sigma):
        raise ValueError(f"need {len(sigma)} degrees, got {len(degrees)}")
    im = sigma.images
    odd = 0
    for p in range(len(im)):
        for q in range(p + 1, len(im)):
            if im[p] > im[q]:
                odd += degrees[im[p] - 1] * degrees[im[q] - 1]
    return -1 if odd % 2 else 1


def antisym_sign(sigma, degrees):
    """chi(sigma) = sign(sigma) * eps(sigma)."""
    if not isinstance(sigma, Permutation):
        sigma = Permutation(sigma)
    return sigma.sign() * koszul_sign(sigma, degrees)


def shuffles(k, m):
    """All (k, m)-shuffles, deterministic order."""
    if k < 0 or m < 0:
        raise ValueError("negative block size")
    n = k + m
    for first in combinations(range(1, n + 1), k):
        rest = [i for i in range(1, n + 1) if i not in first]
        yield Permutation(list(first) + rest)


def multi_shuffles(sizes, dedup=False):
    """Block shuffles Sh(k_1, ..., k_p): increasing inside every block.

    With dedup=True, adjacent blocks of equal size are also required to have
    increasing first elements, which keeps one representative per unordered
    set partition when all block sizes agree.
    """
    sizes = list(sizes)
    if any(k < 1 for k in sizes):
        raise ValueError("block sizes must be >= 1")
    n = sum(sizes)

    def rec(remaining, j):
        if j == len(sizes):
            yield []
            return
        for block in combinations(sorted(remaining), sizes[j]):
            yield_rest = remaining - set(block)
            for tail in rec(yield_rest, j + 1):
                yield [block] + tail

    for blocks in rec(set(range(1, n + 1)), 0):
        if dedup and any(
            sizes[j] == sizes[j + 1] and blocks[j][0] > blocks[j + 1][0] for j in range(len(sizes) - 1)
        ):
            continue
        yield Permutation([i for b in blocks for i in b])


def all_permutations(n):
    for p in permutations(range(1, n + 1)):
        yield Permutation(p)


class GradedSpace:
    """Finite-dimensional graded space with a labelled basis.

    basis: iterable of (label, degree).  `shift` s gives the view V[s], whose
    degrees are the original ones minus s.
    """

    def __init__(self, basis, shift=0):
        items = sorted((int(d), str(lab)) for lab, d in basis)
        labels = [lab for _, lab in items]
        if len(set(labels)) != len(labels):
            raise ValueError("basis labels must be unique")
        self.labels = tuple(labels)
        self.base_degrees = tuple(d for d, _ in items)
        self.shift_by = int(shift)
        self.degrees = tuple(d - self.shift_by for d in self.base_degrees)
        self.parity = tuple(d & 1 for d in self.degrees)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.dim = len(self.labels)
        self._shifts = {}
        self._merge = {}
        self._sort = {}
        self._cop = {}
        self._first = {}
        self._words = {}

    # -- identity -------------------------------------------------------
    def key(self):
        return (self.labels, self.base_degrees, self.shift_by)

    def __eq__(self, other):
        return isinstance(other, GradedSpace) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        body = ", ".join(f"{lab}:{d}" for lab, d in zip(self.labels, self.base_degrees))
        tail = f"[{self.shift_by}]" if self.shift_by else ""
        return f"GradedSpace({body}){tail}"

    def basis(self):
        return list(zip(self.labels, self.base_degrees))

    def shift(self, k=1):
        s = self.shift_by + k
        if s == self.shift_by:
            return self
        sp = self._shifts.get(s)
        if sp is None:
            sp = GradedSpace(self.basis(), s)
            self._shifts[s] = sp
        return sp

    def unshifted(self):
        return self.shift(-self.shift_by)

    def dims(self):
        out = {}
        for lab, d in zip(self.labels, self.degrees):
            out.setdefault(d, []).append(lab)
        return out

    def indices_of_degree(self, d):
        return [i for i, e in enumerate(self.degrees) if e == d]

    # -- words ----------------------------------------------------------
    def word_degree(self, w):
        return sum(self.degrees[i] for i in w)

    def word_parity(self, w):
        return sum(self.parity[i] for i in w) & 1

    def sort_word(self, seq):
        """Canonicalize a factor sequence: returns (sign, word), sign 0 if the word vanishes."""
        seq = tuple(seq)
        r = self._sort.get(seq)
        if r is not None:
            return r
        par = self.parity
        odd = 0
        n = len(seq)
        for p in range(n):
            a = seq[p]
            for q in range(p + 1, n):
                b = seq[q]
                if a > b:
                    odd += par[a] & par[b]
                elif a == b and par[a]:
                    self._sort[seq] = (0, None)
                    return (0, None)
        r = (-1 if odd & 1 else 1, tuple(sorted(seq)))
        self._sort[seq] = r
        return r

    def merge(self, w1, w2):
        """w1 v w2 for canonical words: (sign, word) or (0, None)."""
        key = (w1, w2)
        r = self._merge.get(key)
        if r is not None:
            return r
        if not w1:
            r = (1, w2)
        elif not w2:
            r = (1, w1)
        else:
            par = self.parity
            odd = 0
            zero = False
            for a in w1:
                for b in w2:
                    if a > b:
                        odd += par[a] & par[b]
                    elif a == b and par[a]:
                        zero = True
                        break
                if zero:
                    break
            r = (0, None) if zero else (-1 if odd & 1 else 1, tuple(sorted(w1 + w2)))
        self._merge[key] = r
        return r

    def _split_sign(self, w, left_positions):
        par = self.parity
        left = set(left_positions)
        odd = 0
        n = len(w)
        for p in range(n):
            if p in left:
                continue
            for q in range(p + 1, n):
                if q in left:
                    odd += par[w[p]] & par[w[q]]
        return -1 if odd & 1 else 1

    def coproduct(self, w):
        """Unreduced shuffle coproduct of a canonical word.

        Returns a tuple of (left, right, integer coefficient), splittings summed
        over factor positions so repeated even factors are counted correctly.
        """
        r = self._cop.get(w)
        if r is not None:
            return r
        n = len(w)
        acc = {}
        order = []
        for size in range(n + 1):
            for left in combinations(range(n), size):
                s = self._split_sign(w, left)
                lw = tuple(w[p] for p in left)
                rw = tuple(w[p] for p in range(n) if p not in left)
                key = (lw, rw)
                if key not in acc:
                    order.append(key)
                    acc[key] = 0
                acc[key] += s
        r = tuple((lw, rw, acc[(lw, rw)]) for lw, rw in order if acc[(lw, rw)])
        self._cop[w] = r
        return r

    def reduced_coproduct(self, w):
        if not w:
            raise ValueError("reduced coproduct is not defined on the unit word")
        return tuple(t for t in self.coproduct(w) if t[0] and t[1])

    def first_splits(self, w):
        """Splittings whose left part contains the first factor position."""
        r = self._first.get(w)
        if r is not None:
            return r
        n = len(w)
        acc = {}
        order = []
        for size in range(0, n):
            for rest in combinations(range(1, n), size):
                left = (0,) + rest
                s = self._split_sign(w, left)
                lw = tuple(w[p] for p in left)
                rw = tuple(w[p] for p in range(n) if p not in left)
                key = (lw, rw)
                if key not in acc:
                    order.append(key)
                    acc[key] = 0
                acc[key] += s
        r = tuple((lw, rw, acc[(lw, rw)]) for lw, rw in order if acc[(lw, rw)])
        self._first[w] = r
        return r

    def words(self, n):
        """All canonical words of weight n (odd factors at most once)."""
        r = self._words.get(n)
        if r is None:
            par = self.parity
            r = []
            for c in combinations_with_replacement(range(self.dim), n):
                if any(c[j] == c[j + 1] and par[c[j]] for j in range(n - 1)):
                    continue
                r.append(c)
            r = tuple(r)
            self._words[n] = r
        return r

    def words_upto(self, w_max, start=0):
        out = []
        for n in range(start, w_max + 1):
            out.extend(self.words(n))
        return out

    def word_labels(self, w):
        return [self.labels[i] for i in w]

    def parse_word(self, labels):
        """Labels -> (sign, canonical word)."""
        try:
            idx = [self.index[lab] for lab in labels]
        except KeyError as e:
            raise ValueError(f"unknown basis label {e.args[0]!r}") from None
        return self.sort_word(idx)


def direct_sum_space(spaces, prefixes):
    basis = []
    for sp, pre in zip(spaces, prefixes):
        for lab, d in sp.basis():
            basis.append((f"{pre}{lab}", d))
    return GradedSpace(basis)
