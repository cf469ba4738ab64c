"""Exact arithmetic in Z[zeta] (zeta^2 + zeta + 1 = 0) and 2x2 matrices over it.

Every value is stored on the canonical basis {1, zeta}; occurrences of
zeta^2 in source data are folded via zeta^2 = -1 - zeta at construction
time, so equality is plain componentwise integer equality.  Components
are Python ints, hence arbitrary precision.

The module also houses the built-in dataset ``baechle-gl2-eisenstein``:
the six subgroup generator matrices, the six ambient-group generator
matrices, a 19-relator presentation of the ambient group on all six
names, the Tietze eliminations that cut it down to three generators, and
word expressions for the subgroup generators in those three.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .words import (
    Presentation,
    UnknownSymbolError,
    Word,
    format_word,
    parse_word,
    tietze_eliminate,
)


class NotAUnitError(ValueError):
    """Determinant is not a unit of Z[zeta]; the matrix is not invertible."""


@dataclass(frozen=True)
class EisensteinInt:
    """a + b*zeta with integer a, b."""

    a: int
    b: int

    def __add__(self, other: "EisensteinInt") -> "EisensteinInt":
        return EisensteinInt(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "EisensteinInt") -> "EisensteinInt":
        return EisensteinInt(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "EisensteinInt":
        return EisensteinInt(-self.a, -self.b)

    def __mul__(self, other: "EisensteinInt") -> "EisensteinInt":
        # (a1 + b1 z)(a2 + b2 z), z^2 = -1 - z
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return EisensteinInt(a1 * a2 - b1 * b2, a1 * b2 + b1 * a2 - b1 * b2)

    def conjugate(self) -> "EisensteinInt":
        """Complex conjugate: zeta -> zeta^2."""
        return EisensteinInt(self.a - self.b, -self.b)

    def norm(self) -> int:
        """a^2 - a*b + b^2; multiplicative and >= 0."""
        return self.a * self.a - self.a * self.b + self.b * self.b

    def is_unit(self) -> bool:
        return self.norm() == 1

    def unit_inverse(self) -> "EisensteinInt":
        """Inverse of a unit (its conjugate, since norm is 1)."""
        if not self.is_unit():
            raise NotAUnitError(f"{self} has norm {self.norm()}")
        return self.conjugate()

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __repr__(self) -> str:
        return f"EisensteinInt({self.a}, {self.b})"

    def __str__(self) -> str:
        return f"{self.a}{self.b:+}z"


ZERO = EisensteinInt(0, 0)
ONE = EisensteinInt(1, 0)
ZETA = EisensteinInt(0, 1)

#: The six units of Z[zeta]: +-1, +-zeta, +-zeta^2.
UNITS = (
    ONE, -ONE, ZETA, -ZETA,
    EisensteinInt(-1, -1), EisensteinInt(1, 1),
)


def zeta_poly(c0: int, c1: int, c2: int) -> EisensteinInt:
    """c0 + c1*zeta + c2*zeta^2, folded onto the {1, zeta} basis."""
    return EisensteinInt(c0 - c2, c1 - c2)


Row = tuple[EisensteinInt, EisensteinInt]


@dataclass(frozen=True)
class MatZ2:
    """A 2x2 matrix over Z[zeta], stored as a pair of rows."""

    rows: tuple[Row, Row]

    @classmethod
    def of(cls, e00: EisensteinInt, e01: EisensteinInt,
           e10: EisensteinInt, e11: EisensteinInt) -> "MatZ2":
        return cls(((e00, e01), (e10, e11)))

    @classmethod
    def identity(cls) -> "MatZ2":
        return cls.of(ONE, ZERO, ZERO, ONE)

    def __getitem__(self, rc: tuple[int, int]) -> EisensteinInt:
        return self.rows[rc[0]][rc[1]]

    def __mul__(self, other: "MatZ2") -> "MatZ2":
        (a, b), (c, d) = self.rows
        (e, f), (g, h) = other.rows
        return MatZ2.of(a * e + b * g, a * f + b * h,
                        c * e + d * g, c * f + d * h)

    def det(self) -> EisensteinInt:
        (a, b), (c, d) = self.rows
        return a * d - b * c

    def inverse(self) -> "MatZ2":
        """Adjugate times the inverse of the (unit) determinant."""
        dinv = self.det().unit_inverse()
        (a, b), (c, d) = self.rows
        return MatZ2.of(d * dinv, -b * dinv, -c * dinv, a * dinv)

    def __pow__(self, n: int) -> "MatZ2":
        if n < 0:
            return self.inverse() ** (-n)
        result = MatZ2.identity()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_identity(self) -> bool:
        return self == MatZ2.identity()

    def to_json_obj(self) -> list:
        return [[[e.a, e.b] for e in row] for row in self.rows]

    @classmethod
    def from_json_obj(cls, obj: Sequence) -> "MatZ2":
        rows = tuple(tuple(EisensteinInt(int(e[0]), int(e[1])) for e in row) for row in obj)
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValueError("expected a 2x2 matrix of [a, b] pairs")
        return cls(rows)  # type: ignore[arg-type]


def evaluate_matrix_word(word: Word, images: Mapping[str, MatZ2],
                         alphabet: Sequence[str]) -> MatZ2:
    """Product of generator images along ``word``.

    ``alphabet`` names the word's symbol indices; each name must have an
    image.  Runs of a repeated letter are evaluated by repeated squaring.
    """
    result = MatZ2.identity()
    letters = word.letters
    i = 0
    while i < len(letters):
        idx, sign = letters[i]
        j = i
        while j + 1 < len(letters) and letters[j + 1] == (idx, sign):
            j += 1
        if idx >= len(alphabet) or alphabet[idx] not in images:
            name = alphabet[idx] if idx < len(alphabet) else f"#{idx}"
            raise UnknownSymbolError(name)
        power = (j - i + 1) * sign
        result = result * images[alphabet[idx]] ** power
        i = j + 1
    return result


# ---------------------------------------------------------------------------
# Built-in dataset


@dataclass(frozen=True)
class PaperDataset:
    """Generator matrices, ambient presentation, and subgroup word data.

    ``m_words`` are over the three-letter alphabet that survives the
    eliminations (see ``eliminations``); they evaluate to the matching
    ``s_gens`` entries.
    """

    name: str
    s_gens: dict[str, MatZ2]
    gamma_gens: dict[str, MatZ2]
    swan_presentation: Presentation
    m_words: dict[str, Word]
    m_word_alphabet: tuple[str, ...]
    eliminations: tuple[tuple[str, Word], ...]

    def s_names(self) -> tuple[str, ...]:
        return tuple(self.s_gens)

    def gamma_names(self) -> tuple[str, ...]:
        return tuple(self.gamma_gens)

    def reduced_presentation(self) -> Presentation:
        """Eliminate the redundant generators in the fixed order."""
        pres = self.swan_presentation
        for gen, definition in self.eliminations:
            # Definitions are over the original alphabet; reindex onto the
            # current one by name before eliminating.
            remap = {}
            for i, s in definition.letters:
                src = self.swan_presentation.gen_names[i]
                remap_idx = pres.gen_index(src)
                remap.setdefault(i, remap_idx)
            reindexed = Word(tuple((remap[i], s) for i, s in definition.letters))
            pres = tietze_eliminate(pres, gen, reindexed)
        return pres

    def verify(self) -> None:
        """Check internal consistency; raises AssertionError on failure.

        Verifies unit determinants, that every relator evaluates to the
        identity matrix, that the eliminations leave relators valid, and
        that every subgroup word evaluates to its matrix.
        """
        for name, m in {**self.s_gens, **self.gamma_gens}.items():
            if not m.det().is_unit():
                raise AssertionError(f"generator {name} has non-unit determinant")
        alpha = self.swan_presentation.gen_names
        for k, rel in enumerate(self.swan_presentation.relators):
            if not evaluate_matrix_word(rel, self.gamma_gens, alpha).is_identity():
                raise AssertionError(f"relator {k} does not evaluate to the identity")
        reduced = self.reduced_presentation()
        for k, rel in enumerate(reduced.relators):
            if not evaluate_matrix_word(rel, self.gamma_gens, reduced.gen_names).is_identity():
                raise AssertionError(f"reduced relator {k} does not evaluate to the identity")
        for name, w in self.m_words.items():
            got = evaluate_matrix_word(w, self.gamma_gens, self.m_word_alphabet)
            if got != self.s_gens[name]:
                raise AssertionError(f"word for {name} evaluates to the wrong matrix")

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "s_gens": {k: v.to_json_obj() for k, v in self.s_gens.items()},
            "gamma_gens": {k: v.to_json_obj() for k, v in self.gamma_gens.items()},
            "presentation": self.swan_presentation.to_json_obj(),
            "m_words": {k: _fmt(w, self.m_word_alphabet) for k, w in self.m_words.items()},
            "m_word_alphabet": list(self.m_word_alphabet),
            "eliminations": [[g, _fmt(w, self.swan_presentation.gen_names)]
                             for g, w in self.eliminations],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PaperDataset":
        pres = Presentation.from_json_obj(obj["presentation"])
        m_alpha = tuple(obj["m_word_alphabet"])
        return cls(
            name=obj["name"],
            s_gens={k: MatZ2.from_json_obj(v) for k, v in obj["s_gens"].items()},
            gamma_gens={k: MatZ2.from_json_obj(v) for k, v in obj["gamma_gens"].items()},
            swan_presentation=pres,
            m_words={k: parse_word(v, m_alpha) for k, v in obj["m_words"].items()},
            m_word_alphabet=m_alpha,
            eliminations=tuple((g, parse_word(w, pres.gen_names))
                               for g, w in obj["eliminations"]),
        )

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_obj(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path: str) -> "PaperDataset":
        with open(path) as fh:
            return cls.from_json_obj(json.load(fh))


def _fmt(w: Word, alphabet: Sequence[str]) -> str:
    return format_word(w, alphabet)


_GAMMA_RELATOR_TEXTS = (
    "t*u*t^-1*u^-1",
    "j^2",
    "t*j*t^-1*j^-1",
    "u*j*u^-1*j^-1",
    "l*j*l^-1*j^-1",
    "a*j*a^-1*j^-1",
    "l^3",
    "l^-1*t*l*u*t",
    "l^-1*u*l*t^-1",
    "a^2*j^-1",
    "(a*l)^2*j^-1",
    "(t*a)^3*j^-1",
    "(u*a*l)^3*j^-1",
    "w*j*w^-1*j^-1",
    "w^6",
    "w*t*w^-1*u",
    "w*u*w^-1*u^-1*t^-1",
    "w*a*w^-1*a^-1*l^-2*j^-1",
    "w*l*w^-1*l^-1",
)

_M_WORD_TEXTS = {
    "m1": "w*(t*a*w*t)^-8/w",
    "m2": "w^-1*a*w^-1*(t^-1*w^-1*t^-1*a^-1*t*w*t*a^-1)^3*t^-1*w^-1*t^-1*a^-1*t*w*t",
    "m3": "w^-1*a^-1*w^-1*(a^-1*t*w*t*a^-1*t^-1*w^-1*t^-1)^4*a^-1",
    "mi": "a^-1",
    "mj": "w^2*a^-1*t^-1*w^-1*a^-1*t^-1/w",
    "mt": "(w/a)^2",
}

_ELIMINATION_TEXTS = (
    ("u", "w*t^-1*w^-1"),
    ("j", "a^2"),
    ("l", "w^-1*a^-1*w*a^-1"),
)


def builtin_dataset() -> PaperDataset:
    """The ``baechle-gl2-eisenstein`` dataset."""
    z = zeta_poly
    s_gens = {
        "m1": MatZ2.of(z(0, 0, 97), z(0, -112, -56),
                       z(0, 112, 56), z(0, 0, 97)),
        "m2": MatZ2.of(z(0, 56, 41), z(0, 56, 112),
                       z(0, 56, 112), z(0, -56, 153)),
        "m3": MatZ2.of(z(0, 56, 209), z(0, -56, 56),
                       z(0, -56, 56), z(0, -56, -15)),
        "mi": MatZ2.of(z(0, 0, 0), z(1, 0, 0),
                       z(-1, 0, 0), z(0, 0, 0)),
        "mj": MatZ2.of(z(0, 1, 0), z(0, 0, 1),
                       z(0, 0, 1), z(0, -1, 0)),
        "mt": MatZ2.of(z(0, 1, 0), z(0, 0, 0),
                       z(0, 0, 0), z(0, 1, 0)),
    }
    gamma_gens = {
        "t": MatZ2.of(z(1, 0, 0), z(1, 0, 0), z(0, 0, 0), z(1, 0, 0)),
        "u": MatZ2.of(z(1, 0, 0), z(0, 1, 0), z(0, 0, 0), z(1, 0, 0)),
        "j": MatZ2.of(z(-1, 0, 0), z(0, 0, 0), z(0, 0, 0), z(-1, 0, 0)),
        "l": MatZ2.of(z(0, 0, 1), z(0, 0, 0), z(0, 0, 0), z(0, 1, 0)),
        "a": MatZ2.of(z(0, 0, 0), z(-1, 0, 0), z(1, 0, 0), z(0, 0, 0)),
        "w": MatZ2.of(z(0, -1, 0), z(0, 0, 0), z(0, 0, 0), z(1, 0, 0)),
    }
    pres = Presentation.from_strings(("t", "u", "j", "l", "a", "w"),
                                     _GAMMA_RELATOR_TEXTS)
    m_alpha = ("t", "a", "w")
    m_words = {k: parse_word(v, m_alpha) for k, v in _M_WORD_TEXTS.items()}
    elims = tuple((g, parse_word(w, pres.gen_names)) for g, w in _ELIMINATION_TEXTS)
    return PaperDataset(
        name="baechle-gl2-eisenstein",
        s_gens=s_gens,
        gamma_gens=gamma_gens,
        swan_presentation=pres,
        m_words=m_words,
        m_word_alphabet=m_alpha,
        eliminations=elims,
    )
