"""Finite presentations: a small DSL, Todd-Coxeter enumeration, realization.

Grammar (whitespace insignificant)::

    presentation := "<" gens "|" relators ">"
    gens         := label ("," label)*
    relators     := expr ("," expr)*
    expr         := word ("=" word)?
    word         := factor ("*" factor)*
    factor       := atom ("^" int)?
    atom         := label | "(" word ")" | "[" word "," word "]"

Equations ``u = v`` desugar to the relator ``u * v^-1``; commutators
``[x, y]`` desugar to ``x * y * x^-1 * y^-1`` (left-normed). Coset
enumeration is plain HLT over the trivial subgroup with a coincidence
queue, so a completed table is the regular representation and its row
count is the group order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import InputError, PresentationSyntaxError, ResourceLimitError
from .groups import FiniteGroup

DEFAULT_MAX_COSETS = 100000

# A Word is a freely reduced list of (generator index, nonzero exponent)
# pairs with distinct adjacent generator indices.
Word = tuple[tuple[int, int], ...]


def free_reduce(pairs: Sequence[tuple[int, int]]) -> Word:
    out: list[list[int]] = []
    for g, e in pairs:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)


def invert_word(w: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(w))


def concat_words(*ws: Word) -> Word:
    pairs: list[tuple[int, int]] = []
    for w in ws:
        pairs.extend(w)
    return free_reduce(pairs)


def word_letters(w: Word) -> list[int]:
    """Flatten to a sequence of signed generator letters (g or ~g as -g-1)."""
    out = []
    for g, e in w:
        letter = g if e > 0 else -g - 1
        out.extend([letter] * abs(e))
    return out


@dataclass(frozen=True)
class Presentation:
    generator_labels: tuple[str, ...]
    relators: tuple[Word, ...]
    source: Optional[str] = None

    def __post_init__(self):
        if len(set(self.generator_labels)) != len(self.generator_labels):
            raise InputError("generator labels must be unique")

    def __str__(self):
        return self.source or f"<{','.join(self.generator_labels)} | ...>"


# -- parser ---------------------------------------------------------------------


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _line_col(self, pos):
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message, pos=None):
        line, col = self._line_col(self.pos if pos is None else pos)
        raise PresentationSyntaxError(message, line, col)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def accept(self, ch):
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def label(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        if self.pos == start or not self.text[start].isalpha():
            self.error("expected a generator label")
        return self.text[start : self.pos]

    def integer(self):
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] in ("-",):
            self.error("expected an integer")
        return int(self.text[start : self.pos])


class _WordParser:
    """Recursive-descent parser for the word grammar over fixed labels."""

    def __init__(self, scanner: _Scanner, gen_index: dict[str, int]):
        self.s = scanner
        self.gen_index = gen_index

    def word(self) -> Word:
        factors = [self.factor()]
        while self.s.accept("*"):
            factors.append(self.factor())
        return concat_words(*factors)

    def factor(self) -> Word:
        w = self.atom()
        if self.s.accept("^"):
            e = self.s.integer()
            if e == 0:
                return ()
            if e < 0:
                w, e = invert_word(w), -e
            return concat_words(*([w] * e))
        return w

    def atom(self) -> Word:
        if self.s.accept("("):
            w = self.word()
            self.s.expect(")")
            return w
        if self.s.accept("["):
            x = self.word()
            self.s.expect(",")
            y = self.word()
            self.s.expect("]")
            # left-normed commutator x y x^-1 y^-1
            return concat_words(x, y, invert_word(x), invert_word(y))
        pos = self.s.pos
        lab = self.s.label()
        if lab not in self.gen_index:
            self.s.error(f"unknown generator label {lab!r}", pos)
        return ((self.gen_index[lab], 1),)


def parse_presentation(text: str) -> Presentation:
    """Parse ``< gens | relators >`` into freely reduced relators."""
    s = _Scanner(text)
    s.expect("<")
    labels = [s.label()]
    while s.accept(","):
        labels.append(s.label())
    if len(set(labels)) != len(labels):
        s.error("duplicate generator label")
    s.expect("|")
    gen_index = {lab: i for i, lab in enumerate(labels)}
    wp = _WordParser(s, gen_index)
    relators: list[Word] = []
    while True:
        lhs = wp.word()
        if s.accept("="):
            rhs = wp.word()
            while s.accept("="):  # chains like a^2 = b^2 = 1 are not in the
                s.error("chained equations are not supported")
            lhs = concat_words(lhs, invert_word(rhs))
        relators.append(lhs)
        if not s.accept(","):
            break
    s.expect(">")
    s.skip_ws()
    if s.pos != len(s.text):
        s.error("trailing input after presentation")
    return Presentation(tuple(labels), tuple(relators), source=text)


def parse_word(text: str, labels: Sequence[str]) -> Word:
    """Parse a single word over the given generator labels."""
    s = _Scanner(text)
    gen_index = {lab: i for i, lab in enumerate(labels)}
    w = _WordParser(s, gen_index).word()
    s.skip_ws()
    if s.pos != len(s.text):
        s.error("trailing input after word")
    return w


# -- Todd-Coxeter -----------------------------------------------------------------


@dataclass
class CosetTable:
    """Completed coset table: row per coset, column per generator/inverse.

    ``table[q][2*g]`` is the image of coset q under generator g and
    ``table[q][2*g + 1]`` under its inverse. ``complete`` is set once the
    table closed with every relator tracing back to its starting coset.
    """

    presentation: Presentation
    table: np.ndarray
    complete: bool

    @property
    def num_cosets(self) -> int:
        return int(self.table.shape[0])


def _letter_to_col(letter: int) -> int:
    return 2 * letter if letter >= 0 else 2 * (-letter - 1) + 1


def todd_coxeter(P: Presentation, max_cosets: int = DEFAULT_MAX_COSETS) -> CosetTable:
    """HLT coset enumeration over the trivial subgroup.

    Deterministic: cosets are scanned in order, relators in presentation
    order, and stalled scans are completed by defining the lowest-numbered
    hole first. Coincidences are merged through a union-find queue.
    """
    if max_cosets < 1:
        raise InputError("max_cosets must be at least 1")
    ngen = len(P.generator_labels)
    ncols = 2 * ngen
    relator_cols = [
        [_letter_to_col(l) for l in word_letters(w)] for w in P.relators
    ]
    table: list[list[int]] = [[-1] * ncols]
    rep = [0]  # union-find for coincidences

    def find(q):
        while rep[q] != q:
            rep[q] = rep[rep[q]]
            q = rep[q]
        return q

    def define(q, col):
        if len(table) >= max_cosets:
            raise ResourceLimitError(
                f"coset enumeration exceeded {max_cosets} cosets"
            )
        r = len(table)
        table.append([-1] * ncols)
        rep.append(r)
        table[q][col] = r
        table[r][col ^ 1] = q
        return r

    coincidences: list[tuple[int, int]] = []

    def merge(a, b):
        a, b = find(a), find(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        rep[b] = a
        row = table[b]
        for col in range(ncols):
            c = row[col]
            if c >= 0:
                # undefine and replay the edge from the surviving coset
                queue_edges.append((a, col, c))
        table[b] = [-1] * ncols

    queue_edges: list[tuple[int, int, int]] = []

    def set_edge(q, col, r):
        q, r = find(q), find(r)
        cur = table[q][col]
        if cur >= 0 and find(cur) != r:
            coincidences.append((find(cur), r))
        else:
            table[q][col] = r
        cur_back = table[r][col ^ 1]
        if cur_back >= 0 and find(cur_back) != q:
            coincidences.append((find(cur_back), q))
        else:
            table[r][col ^ 1] = q

    def process_coincidences():
        while coincidences or queue_edges:
            while queue_edges:
                q, col, r = queue_edges.pop()
                set_edge(find(q), col, find(r))
            if coincidences:
                merge(*coincidences.pop())

    def scan_and_fill(q, cols):
        # forward as far as possible, then backward, then fill the gap
        while True:
            q = find(q)
            f, i = q, 0
            while i < len(cols):
                nxt = table[f][cols[i]]
                if nxt < 0:
                    break
                f, i = find(nxt), i + 1
            if i == len(cols):
                if f != q:
                    coincidences.append((f, q))
                    process_coincidences()
                return
            b, j = q, len(cols)
            while j > i:
                prv = table[b][cols[j - 1] ^ 1]
                if prv < 0:
                    break
                b, j = find(prv), j - 1
            if j == i + 1:
                set_edge(f, cols[i], b)
                process_coincidences()
                return
            if j == i:
                coincidences.append((f, b))
                process_coincidences()
                return
            define(f, cols[i])
            process_coincidences()

    q = 0
    while q < len(table):
        if find(q) != q:
            q += 1
            continue
        for cols in relator_cols:
            if find(q) != q:
                break
            scan_and_fill(q, cols)
        if find(q) == q:
            for col in range(ncols):
                if find(q) != q:
                    break
                if table[q][col] < 0:
                    define(q, col)
                    process_coincidences()
        q += 1

    live = [q for q in range(len(table)) if find(q) == q]
    newidx = {q: i for i, q in enumerate(live)}
    compact = np.empty((len(live), ncols), dtype=np.int32)
    for i, q in enumerate(live):
        for col in range(ncols):
            t = table[q][col]
            if t < 0:
                raise ResourceLimitError("coset table failed to close")
            compact[i, col] = newidx[find(t)]
    ct = CosetTable(P, compact, complete=True)
    _verify_table(ct)
    return ct


def _verify_table(ct: CosetTable):
    """Closed-table property: every relator traces to its starting coset."""
    tab = ct.table
    for w in ct.presentation.relators:
        cols = [_letter_to_col(l) for l in word_letters(w)]
        for q in range(tab.shape[0]):
            r = q
            for c in cols:
                r = int(tab[r, c])
            if r != q:
                raise InputError("relator does not close on the coset table")


def coset_table_to_group(T: CosetTable) -> FiniteGroup:
    """Realize the regular representation of a completed table as a group.

    Coset 0 is the identity; coset q corresponds to the word carrying 0 to
    q, and products are computed by tracing that word from another coset.
    """
    if not T.complete:
        raise InputError("coset table is not complete")
    tab = T.table
    n = T.num_cosets
    ngen = len(T.presentation.generator_labels)
    # breadth-first words over the generator/inverse columns
    word_of: list[Optional[list[int]]] = [None] * n
    word_of[0] = []
    queue = [0]
    while queue:
        nxt = []
        for q in queue:
            for col in range(2 * ngen):
                r = int(tab[q, col])
                if word_of[r] is None:
                    word_of[r] = word_of[q] + [col]
                    nxt.append(r)
        queue = nxt
    if any(w is None for w in word_of):
        raise InputError("coset table is not transitive")

    mul = np.empty((n, n), dtype=np.int32)
    for j in range(n):
        cur = np.arange(n, dtype=np.int32)
        for c in word_of[j]:
            cur = tab[cur, c]
        mul[:, j] = cur
    gens = [int(tab[0, 2 * g]) for g in range(ngen)]
    kept, labs = [], []
    for g, lab in zip(gens, T.presentation.generator_labels):
        if g != 0 and g not in kept:
            kept.append(g)
            labs.append(lab)
    return FiniteGroup(
        mul,
        generators=kept or None,
        gen_labels=labs or None,
        label=T.presentation.source,
    )


def realize_presentation(text: str, max_cosets: int = DEFAULT_MAX_COSETS) -> FiniteGroup:
    return coset_table_to_group(todd_coxeter(parse_presentation(text), max_cosets))


G243_PRESENTATION = (
    "<a,b,c | a^3=c^3, a^9, b^9, [a,b]=c^8*b^6, [b,c]=a^3, [a,c]=b^3*c^6>"
)


@lru_cache(maxsize=1)
def g243_group() -> FiniteGroup:
    """The order-243 exponent-9 group realized from its presentation."""
    G = realize_presentation(G243_PRESENTATION)
    if G.order != 243:
        raise InputError("G243 realization produced the wrong order")
    G.label = "G243"
    return G


def evaluate_word_in(G: FiniteGroup, text: str) -> int:
    """Evaluate a DSL word over G's generator labels to an element index."""
    w = parse_word(text, G.gen_labels)
    return G.evaluate_word(w)
