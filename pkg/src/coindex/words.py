"""Free-group words, presentations, and Tietze simplification.

Words are flat sequences of signed letters over a named alphabet.  The
letter representation is ``(symbol_index, sign)`` with ``sign`` in
``{+1, -1}``; run-length syllables are deliberately avoided because the
rewriting machinery downstream scans letters one at a time anyway.

The parser accepts the compact notation used throughout this package's
datasets: ``*`` for products, ``/x`` for multiplication by an inverse,
``^k`` for (possibly negative) integer powers, parentheses, and
juxtaposition of single-character symbols (``tawt`` means ``t*a*w*t``).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class WordSyntaxError(ValueError):
    """Malformed word text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownSymbolError(KeyError):
    """A symbol is not part of the alphabet in use."""


class SelfReferentialDefinitionError(ValueError):
    """A generator definition mentions the generator being eliminated."""


Letter = tuple[int, int]
ExponentVector = tuple[int, ...]


@dataclass(frozen=True)
class Word:
    """A word in a free group, as a tuple of (symbol_index, sign) letters.

    Words are not automatically freely reduced; use :func:`free_reduce`.
    """

    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        for idx, sign in self.letters:
            if sign not in (1, -1):
                raise ValueError(f"letter sign must be +-1, got {sign}")
            if idx < 0:
                raise ValueError(f"letter index must be >= 0, got {idx}")

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return Word()
        base = self if n > 0 else self.inverse()
        return Word(base.letters * abs(n))

    def inverse(self) -> "Word":
        return Word(tuple((i, -s) for i, s in reversed(self.letters)))

    def is_empty(self) -> bool:
        return not self.letters

    def max_symbol(self) -> int:
        """Largest symbol index used, or -1 for the empty word."""
        return max((i for i, _ in self.letters), default=-1)


EMPTY_WORD = Word()


def letter(idx: int, sign: int = 1) -> Word:
    return Word(((idx, sign),))


def free_reduce(w: Word) -> Word:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[Letter] = []
    for lt in w.letters:
        if out and out[-1][0] == lt[0] and out[-1][1] == -lt[1]:
            out.pop()
        else:
            out.append(lt)
    return Word(tuple(out))


def cyclic_reduce(w: Word) -> Word:
    """Freely reduce, then strip matching first/last inverse letters."""
    red = free_reduce(w).letters
    lo, hi = 0, len(red)
    while hi - lo >= 2 and red[lo][0] == red[hi - 1][0] and red[lo][1] == -red[hi - 1][1]:
        lo += 1
        hi -= 1
    return Word(red[lo:hi])


def substitute(w: Word, images: Mapping[int, Word]) -> Word:
    """Apply the homomorphism sending each symbol to its image word.

    The result is freely reduced.  Raises UnknownSymbolError when a
    symbol of ``w`` has no image.
    """
    out: list[Letter] = []
    for idx, sign in w.letters:
        if idx not in images:
            raise UnknownSymbolError(idx)
        img = images[idx]
        seq = img.letters if sign > 0 else img.inverse().letters
        for lt in seq:
            if out and out[-1][0] == lt[0] and out[-1][1] == -lt[1]:
                out.pop()
            else:
                out.append(lt)
    return Word(tuple(out))


def exponent_vector(w: Word, n_gens: int) -> ExponentVector:
    """Sum of letter signs per generator; homomorphic to Z^n."""
    ev = [0] * n_gens
    for idx, sign in w.letters:
        if idx >= n_gens:
            raise UnknownSymbolError(idx)
        ev[idx] += sign
    return tuple(ev)


# ---------------------------------------------------------------------------
# Parsing and printing


def _tokenize_symbol(text: str, pos: int, alphabet: Sequence[str]) -> tuple[int, int]:
    """Greedy longest-prefix match of an alphabet symbol at ``pos``.

    Returns (symbol_index, new_pos).
    """
    best = -1
    best_len = 0
    for i, name in enumerate(alphabet):
        ln = len(name)
        if ln > best_len and text.startswith(name, pos):
            best = i
            best_len = ln
    if best < 0:
        raise UnknownSymbolError(f"no alphabet symbol matches {text[pos:pos + 8]!r} at position {pos}")
    return best, pos + best_len


def parse_word(text: str, alphabet: Sequence[str]) -> Word:
    """Parse word notation over ``alphabet`` into an unreduced Word.

    Grammar: expr := term (('*'|'/')? term)* ; term := factor ('^' int)? ;
    factor := symbol | '(' expr ')'.  A '/' multiplies by the inverse of
    the following term.  Juxtaposition (no operator) multiplies.
    """
    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def parse_int() -> int:
        nonlocal pos
        start = pos
        if pos < n and text[pos] in "+-":
            pos += 1
        if pos >= n or not text[pos].isdigit():
            raise WordSyntaxError("expected integer exponent", start)
        while pos < n and text[pos].isdigit():
            pos += 1
        return int(text[start:pos])

    def parse_factor() -> Word:
        nonlocal pos
        skip_ws()
        if pos >= n:
            raise WordSyntaxError("unexpected end of input", pos)
        if text[pos] == "(":
            open_pos = pos
            pos += 1
            inner = parse_expr()
            skip_ws()
            if pos >= n or text[pos] != ")":
                raise WordSyntaxError("unbalanced parenthesis", open_pos)
            pos += 1
            return inner
        idx, pos = _tokenize_symbol(text, pos, alphabet)
        return letter(idx)

    def parse_term() -> Word:
        nonlocal pos
        fac = parse_factor()
        skip_ws()
        if pos < n and text[pos] == "^":
            pos += 1
            skip_ws()
            return fac ** parse_int()
        return fac

    def parse_expr() -> Word:
        nonlocal pos
        out = parse_term()
        while True:
            skip_ws()
            if pos >= n or text[pos] == ")":
                return out
            if text[pos] == "*":
                pos += 1
                out = out * parse_term()
            elif text[pos] == "/":
                pos += 1
                out = out * parse_term().inverse()
            else:
                # juxtaposition
                out = out * parse_term()

    skip_ws()
    if pos == n:
        return EMPTY_WORD
    result = parse_expr()
    skip_ws()
    if pos != n:
        raise WordSyntaxError(f"trailing input {text[pos:]!r}", pos)
    return result


def format_word(w: Word, alphabet: Sequence[str]) -> str:
    """Inverse of parse_word up to free equality; runs become powers.

    The empty word prints as the empty string, which parses back to it.
    """
    if not w.letters:
        return ""
    parts: list[str] = []
    i = 0
    letters = w.letters
    while i < len(letters):
        idx, sign = letters[i]
        j = i
        while j + 1 < len(letters) and letters[j + 1] == (idx, sign):
            j += 1
        count = (j - i + 1) * sign
        name = alphabet[idx]
        parts.append(name if count == 1 else f"{name}^{count}")
        i = j + 1
    return "*".join(parts)


# ---------------------------------------------------------------------------
# Presentations


def _canonical_relator_key(w: Word) -> tuple[Letter, ...]:
    """Least rotation among all rotations of w and of w^-1 (for dedup)."""
    best = None
    for cand in (w.letters, w.inverse().letters):
        m = len(cand)
        for r in range(m):
            rot = cand[r:] + cand[:r]
            if best is None or rot < best:
                best = rot
    return best if best is not None else ()


@dataclass(frozen=True)
class Presentation:
    """A finite presentation: generator names plus relator words.

    Relators are stored freely and cyclically reduced; empty relators
    and exact duplicates (up to rotation and inversion) are dropped at
    construction.
    """

    gen_names: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        names = tuple(self.gen_names)
        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")
        seen: set[tuple[Letter, ...]] = set()
        cleaned: list[Word] = []
        for rel in self.relators:
            if rel.max_symbol() >= len(names):
                raise UnknownSymbolError(rel.max_symbol())
            red = cyclic_reduce(rel)
            if red.is_empty():
                continue
            key = _canonical_relator_key(red)
            if key in seen:
                continue
            seen.add(key)
            cleaned.append(red)
        object.__setattr__(self, "gen_names", names)
        object.__setattr__(self, "relators", tuple(cleaned))

    @property
    def n_gens(self) -> int:
        return len(self.gen_names)

    def gen_index(self, name: str) -> int:
        try:
            return self.gen_names.index(name)
        except ValueError:
            raise UnknownSymbolError(name) from None

    def parse(self, text: str) -> Word:
        return parse_word(text, self.gen_names)

    @classmethod
    def from_strings(cls, gen_names: Sequence[str], relator_texts: Iterable[str]) -> "Presentation":
        names = tuple(gen_names)
        return cls(names, tuple(parse_word(t, names) for t in relator_texts))

    def to_json_obj(self) -> dict:
        return {
            "generators": list(self.gen_names),
            "relators": [format_word(r, self.gen_names) for r in self.relators],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Presentation":
        return cls.from_strings(obj["generators"], obj["relators"])


def tietze_eliminate(p: Presentation, gen: str, definition: Word) -> Presentation:
    """Remove ``gen`` from the presentation, replacing it by ``definition``.

    ``definition`` is a word over the full current alphabet that must not
    mention ``gen`` itself.  Every relator has ``gen`` substituted, then
    relators are re-reduced; the defining relation is expected to become
    trivial and fall away.
    """
    gi = p.gen_index(gen)
    if any(idx == gi for idx, _ in definition.letters):
        raise SelfReferentialDefinitionError(gen)
    if definition.max_symbol() >= p.n_gens:
        raise UnknownSymbolError(definition.max_symbol())

    new_names = p.gen_names[:gi] + p.gen_names[gi + 1:]

    def reindex(idx: int) -> int:
        return idx if idx < gi else idx - 1

    reindexed_def = Word(tuple((reindex(i), s) for i, s in definition.letters))
    images = {j: letter(reindex(j)) for j in range(p.n_gens) if j != gi}
    images[gi] = reindexed_def
    new_relators = tuple(substitute(r, images) for r in p.relators)
    return Presentation(new_names, new_relators)


def _solve_for(rel: Word, pos: int) -> Word:
    """Given relator x g^s y with g at ``pos``, return the word equal to g."""
    x = Word(rel.letters[:pos])
    y = Word(rel.letters[pos + 1:])
    _, sign = rel.letters[pos]
    if sign > 0:
        # x g y = 1  =>  g = x^-1 y^-1
        return free_reduce(x.inverse() * y.inverse())
    # x g^-1 y = 1  =>  g = y x
    return free_reduce(y * x)


def simplify_presentation(p: Presentation, effort: int = 50_000,
                          length_cap: int = 100) -> Presentation:
    """Heuristic Tietze simplification.

    Repeatedly (a) eliminates generators that occur exactly once in some
    relator (provided the resulting definition is no longer than
    ``length_cap``), taking the shortest usable relator first, and then
    (b) shortens relators using rotated subwords of other relators.
    Each action consumes one unit of ``effort``; the current state is
    returned when the budget runs out or nothing applies.  Deterministic
    for a fixed budget.

    Elimination bookkeeping is incremental (only relators containing the
    eliminated generator are touched), so this stays usable on the large
    presentations coming out of Reidemeister-Schreier rewriting.
    """
    current, budget = _eliminate_single_occurrences(p, effort, length_cap)
    # (b) subword shortening is all-pairs; apply it only once the
    # presentation is small, then resume eliminating.
    while (budget > 0 and current.n_gens <= 64
           and len(current.relators) <= 256):
        shortened = _shorten_once(current)
        if shortened is None:
            break
        budget -= 1
        current, budget = _eliminate_single_occurrences(shortened, budget, length_cap)
    return current


def _eliminate_single_occurrences(p: Presentation, budget: int,
                                  length_cap: int) -> tuple[Presentation, int]:
    """Drive (a)-moves to exhaustion or budget; returns the new state."""
    rels: dict[int, tuple[Letter, ...]] = {i: r.letters for i, r in enumerate(p.relators)}
    occ: dict[int, set[int]] = {g: set() for g in range(p.n_gens)}
    canon: dict[tuple[Letter, ...], int] = {}
    next_id = len(rels)

    def register(rid: int) -> bool:
        """Dedup + occurrence bookkeeping; False when rid was dropped."""
        letters = rels[rid]
        if not letters:
            del rels[rid]
            return False
        key = _canonical_relator_key(Word(letters))
        other = canon.get(key)
        if other is not None and other != rid and other in rels:
            del rels[rid]
            return False
        canon[key] = rid
        for g in {i for i, _ in letters}:
            occ[g].add(rid)
        return True

    def unregister(rid: int) -> None:
        for g in {i for i, _ in rels[rid]}:
            bucket = occ.get(g)
            if bucket is not None:
                bucket.discard(rid)

    heap: list[tuple[int, int]] = []
    for rid in list(rels):
        if register(rid):
            heapq.heappush(heap, (len(rels[rid]), rid))

    alive_gens = set(range(p.n_gens))
    while heap and budget > 0:
        ln, rid = heapq.heappop(heap)
        letters = rels.get(rid)
        if letters is None or len(letters) != ln:
            continue  # stale entry
        counts: dict[int, int] = {}
        for g, _ in letters:
            counts[g] = counts.get(g, 0) + 1
        pick = None
        for pos, (g, _) in enumerate(letters):
            if counts[g] == 1 and ln - 1 <= length_cap:
                pick = (g, pos)
                break
        if pick is None:
            continue
        g, pos = pick
        definition = _solve_for(Word(letters), pos).letters

        def drop(did: int) -> tuple[Letter, ...]:
            old = rels[did]
            unregister(did)
            key = _canonical_relator_key(Word(old))
            if canon.get(key) == did:
                del canon[key]
            del rels[did]
            return old

        drop(rid)
        targets = sorted(occ.pop(g))
        alive_gens.discard(g)
        for tid in targets:
            if tid not in rels:
                continue
            old = drop(tid)
            new_letters: list[Letter] = []
            for gg, s in old:
                seq = ((gg, s),) if gg != g else (
                    definition if s > 0 else Word(definition).inverse().letters)
                for lt in seq:
                    if new_letters and new_letters[-1][0] == lt[0] and new_letters[-1][1] == -lt[1]:
                        new_letters.pop()
                    else:
                        new_letters.append(lt)
            reduced = cyclic_reduce(Word(tuple(new_letters))).letters
            new_id = next_id
            next_id += 1
            rels[new_id] = reduced
            if register(new_id):
                heapq.heappush(heap, (len(reduced), new_id))
        budget -= 1

    # rebuild on the surviving alphabet
    keep = sorted(alive_gens)
    remap = {g: i for i, g in enumerate(keep)}
    gen_names = tuple(p.gen_names[g] for g in keep)
    out_relators = tuple(Word(tuple((remap[g], s) for g, s in rels[rid]))
                         for rid in sorted(rels))
    return Presentation(gen_names, out_relators), budget


def _shorten_once(p: Presentation) -> Presentation | None:
    rels = list(p.relators)
    for si in range(len(rels)):
        s = rels[si].letters
        for ri in range(len(rels)):
            if ri == si:
                continue
            r = rels[ri]
            if len(r) >= len(s) or len(r) < 2:
                continue
            for base in (r.letters, r.inverse().letters):
                m = len(base)
                half = m // 2 + 1
                for rot in range(m):
                    rotated = base[rot:] + base[:rot]
                    for ln in range(m, half - 1, -1):
                        u = rotated[:ln]
                        hit = _find_subword(s, u)
                        if hit < 0:
                            continue
                        v_inv = Word(rotated[ln:]).inverse()
                        new_s = Word(s[:hit]) * v_inv * Word(s[hit + ln:])
                        new_s = cyclic_reduce(new_s)
                        if len(new_s) < len(rels[si]):
                            rels[si] = new_s
                            return Presentation(p.gen_names, tuple(rels))
    return None


def _find_subword(haystack: tuple[Letter, ...], needle: tuple[Letter, ...]) -> int:
    n, m = len(haystack), len(needle)
    for i in range(n - m + 1):
        if haystack[i:i + m] == needle:
            return i
    return -1
