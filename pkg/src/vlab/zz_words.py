"""Normal forms in ``Z^2 * Z = <a, b, c | [a, b]>``.

A reduced word is an alternating sequence of blocks: ``AB(x, y)`` standing
for ``a^x b^y`` (not both zero) and ``C(z)`` standing for ``c^z`` (z nonzero).
Since ``a`` and ``b`` commute, this sequence is unique for each group element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import ParseError


class AB(NamedTuple):
    x: int
    y: int


class C(NamedTuple):
    z: int


Block = AB | C

_LETTERS = {
    "a": AB(1, 0), "A": AB(-1, 0),
    "b": AB(0, 1), "B": AB(0, -1),
    "c": C(1), "C": C(-1),
}


def _push(out: list[Block], blk: Block) -> None:
    """Append ``blk`` to a reduced block list, merging and cancelling."""
    if isinstance(blk, AB):
        if blk.x == 0 and blk.y == 0:
            return
    elif blk.z == 0:
        return
    if out and type(out[-1]) is type(blk):
        top = out.pop()
        if isinstance(blk, AB):
            blk = AB(top.x + blk.x, top.y + blk.y)
        else:
            blk = C(top.z + blk.z)
        _push(out, blk)
        return
    out.append(blk)


@dataclass(frozen=True)
class ZZWord:
    blocks: tuple[Block, ...] = ()

    @classmethod
    def from_blocks(cls, blocks: Iterable[Block]) -> ZZWord:
        out: list[Block] = []
        for blk in blocks:
            _push(out, blk)
        return cls(tuple(out))

    @classmethod
    def identity(cls) -> ZZWord:
        return cls(())

    @classmethod
    def gen(cls, letter: str) -> ZZWord:
        return cls((_LETTERS[letter],))

    @property
    def is_identity(self) -> bool:
        return not self.blocks

    def __mul__(self, other: ZZWord) -> ZZWord:
        out = list(self.blocks)
        for blk in other.blocks:
            _push(out, blk)
        return ZZWord(tuple(out))

    def inverse(self) -> ZZWord:
        return ZZWord(tuple(
            AB(-b.x, -b.y) if isinstance(b, AB) else C(-b.z) for b in reversed(self.blocks)
        ))

    __invert__ = inverse

    def __pow__(self, k: int) -> ZZWord:
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ZZWord(), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def letters(self) -> str:
        """The word spelled in letters, capitals for inverses."""
        parts = []
        for b in self.blocks:
            if isinstance(b, AB):
                parts.append(("a" if b.x > 0 else "A") * abs(b.x))
                parts.append(("b" if b.y > 0 else "B") * abs(b.y))
            else:
                parts.append(("c" if b.z > 0 else "C") * abs(b.z))
        return "".join(parts)

    def __len__(self) -> int:
        return sum(abs(b.x) + abs(b.y) if isinstance(b, AB) else abs(b.z) for b in self.blocks)

    def __str__(self) -> str:
        return format_word(self)


def commutator(u: ZZWord, v: ZZWord) -> ZZWord:
    return u.inverse() * v.inverse() * u * v


def conjugate(u: ZZWord, v: ZZWord) -> ZZWord:
    return v.inverse() * u * v


def ab(x: int, y: int) -> ZZWord:
    return ZZWord.from_blocks([AB(x, y)])


def cpow(z: int) -> ZZWord:
    return ZZWord.from_blocks([C(z)])


A_WORD, B_WORD, C_WORD = ZZWord.gen("a"), ZZWord.gen("b"), ZZWord.gen("c")


def zz_reduce(letters: Iterable[str]) -> ZZWord:
    """Normal form of a sequence of letters from ``a b c A B C``."""
    out: list[Block] = []
    for ch in letters:
        try:
            _push(out, _LETTERS[ch])
        except KeyError:
            raise ValueError(f"unknown letter {ch!r}") from None
    return ZZWord(tuple(out))


def substitute(w: ZZWord, a: ZZWord, b: ZZWord, c: ZZWord) -> ZZWord:
    """The image of ``w`` under ``a, b, c -> the given words``."""
    out = ZZWord()
    for blk in w.blocks:
        if isinstance(blk, AB):
            out = out * (a ** blk.x) * (b ** blk.y)
        else:
            out = out * (c ** blk.z)
    return out


def evaluate(w: ZZWord, a, b, c, *, identity, mul, pow_):
    """Evaluate ``w`` in any group given by ``mul`` and ``pow_``."""
    out = identity
    for blk in w.blocks:
        if isinstance(blk, AB):
            if blk.x:
                out = mul(out, pow_(a, blk.x))
            if blk.y:
                out = mul(out, pow_(b, blk.y))
        else:
            out = mul(out, pow_(c, blk.z))
    return out


# ------------------------------------------------------------------ commutators

def abc_commutator(params: Sequence[tuple[int, int, int]], c: ZZWord = C_WORD) -> ZZWord:
    """``[a^x1 b^y1, [a^x2 b^y2, ... [a^xn b^yn, c^zn]^z(n-1) ...]^z1]``.

    ``c`` may be any word, which nests one commutator inside another.
    """
    if not params:
        raise ValueError("at least one (x, y, z) triple is required")
    for x, y, z in params:
        if x == 0 and y == 0:
            raise ValueError(f"a-b exponents ({x}, {y}) are both zero")
        if z == 0:
            raise ValueError("c exponents must be nonzero")
    w = c
    for x, y, z in reversed(params):
        w = commutator(ab(x, y), w ** z)
    return w


def ends_in_form_star_star(w: ZZWord, i: int, j: int, k: int) -> str | None:
    """Match the tail of ``w`` against the two shapes

    top:    ``c^-k a^(f i) b^(f j) c^k``
    bottom: ``c^-k a^(-f i) b^(-f j) c^k a^i b^j``

    with ``f >= 1``; returns ``"top"``, ``"bottom"`` or None.
    """
    if (i == 0 and j == 0) or k == 0:
        raise ValueError("need |i| + |j| != 0 and k != 0")

    def multiple(blk: Block, sign: int) -> bool:
        if not isinstance(blk, AB):
            return False
        # blk == sign * f * (i, j) for some f >= 1
        f_num = blk.x * i + blk.y * j
        norm = i * i + j * j
        if f_num % norm:
            return False
        f = sign * f_num // norm
        return f >= 1 and blk == AB(sign * f * i, sign * f * j)

    bl = w.blocks
    if len(bl) >= 3 and bl[-1] == C(k) and bl[-3] == C(-k) and multiple(bl[-2], 1):
        return "top"
    if (len(bl) >= 4 and bl[-1] == AB(i, j) and bl[-2] == C(k)
            and bl[-4] == C(-k) and multiple(bl[-3], -1)):
        return "bottom"
    return None


# ------------------------------------------------------------------ text format

def format_word(w: ZZWord) -> str:
    if not w.blocks:
        return "1"
    parts = []

    def term(letter: str, e: int) -> None:
        parts.append(letter if e == 1 else f"{letter}^{e}")

    for blk in w.blocks:
        if isinstance(blk, AB):
            if blk.x:
                term("a", blk.x)
            if blk.y:
                term("b", blk.y)
        else:
            term("c", blk.z)
    return " ".join(parts)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.text, self.pos)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expr(self, stop: str) -> ZZWord:
        w = ZZWord()
        while True:
            ch = self.peek()
            if ch == "" or ch in stop:
                return w
            w = w * self.factor()

    def factor(self) -> ZZWord:
        ch = self.peek()
        if ch in _LETTERS:
            self.pos += 1
            base = ZZWord.gen(ch)
        elif ch == "1":
            self.pos += 1
            base = ZZWord()
        elif ch == "(":
            self.pos += 1
            base = self.expr(")")
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.pos += 1
        elif ch == "[":
            self.pos += 1
            u = self.expr(",]")
            if self.peek() != ",":
                raise self.error("expected ',' in commutator")
            self.pos += 1
            v = self.expr("]")
            if self.peek() != "]":
                raise self.error("expected ']'")
            self.pos += 1
            base = commutator(u, v)
        else:
            raise self.error(f"unexpected character {ch!r}")
        if self.peek() == "^":
            self.pos += 1
            self.skip()
            start = self.pos
            if self.pos < len(self.text) and self.text[self.pos] in "+-":
                self.pos += 1
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            digits = self.text[start:self.pos]
            if not digits.lstrip("+-"):
                self.pos = start
                raise self.error("expected integer exponent")
            base = base ** int(digits)
        return base


def parse_word(text: str) -> ZZWord:
    """Parse letters, ``^`` powers, parentheses and ``[u,v]`` commutators."""
    p = _Parser(text)
    w = p.expr("")
    if p.peek():
        raise p.error("trailing input")
    return w
