"""Prefix-exchange homeomorphisms of the d-ary Cantor space.

This is an independent model of the tree-pair groups: points are infinite
words over {1..d} (kept eventually periodic so arithmetic stays exact),
tree automorphisms are finite-state automata acting by the wreath recursion
g(i w) = rho(g)(i) . section_i(g)(w), and a homeomorphism is a finite table
of cone-to-cone rules whose domain and range words each form a complete
prefix code.  Tables with trivial states realize the Higman-Thompson group
V_d; adding automaton states gives the groups built over a self-similar
group.  The thompson module's algebra is cross-checked against composition
of these tables.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .groups import UnsupportedError, perm_identity, perm_apply
from .thompson import Element
from .trees import leaf_words

Word = tuple[int, ...]


# ---------------------------------------------------------------------------
# eventually periodic points of the Cantor space
# ---------------------------------------------------------------------------

class CantorWord:
    """An eventually periodic infinite word: preperiod then repeated period.

    Canonical form: the period is primitive (not a power of a shorter word)
    and the preperiod is as short as possible, letters being absorbed into a
    rotated period whenever they match its tail.  Text form "pre(period)"
    with single-digit letters, e.g. "1(2)" for 1222...
    """

    __slots__ = ("pre", "per", "_hash")

    def __init__(self, pre: Iterable[int] = (), per: Iterable[int] = (1,)):
        pre = tuple(pre)
        per = tuple(per)
        if not per:
            raise ValueError("period must be nonempty")
        for letter in pre + per:
            if not isinstance(letter, int) or letter < 1:
                raise ValueError(f"bad letter {letter!r}")
        for width in range(1, len(per)):
            if len(per) % width == 0 and per == per[:width] * (len(per) // width):
                per = per[:width]
                break
        while pre and pre[-1] == per[-1]:
            per = (per[-1],) + per[:-1]
            pre = pre[:-1]
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "per", per)
        object.__setattr__(self, "_hash", hash((pre, per)))

    def __setattr__(self, name, value):
        raise AttributeError("CantorWord is immutable")

    def letter(self, i: int) -> int:
        """0-based letter of the infinite word."""
        if i < len(self.pre):
            return self.pre[i]
        return self.per[(i - len(self.pre)) % len(self.per)]

    def prefix(self, k: int) -> Word:
        return tuple(self.letter(i) for i in range(k))

    def drop(self, k: int) -> "CantorWord":
        """The shift: remove the first k letters."""
        if k <= len(self.pre):
            return CantorWord(self.pre[k:], self.per)
        j = (k - len(self.pre)) % len(self.per)
        return CantorWord((), self.per[j:] + self.per[:j])

    def __eq__(self, other):
        if not isinstance(other, CantorWord):
            return NotImplemented
        return self.pre == other.pre and self.per == other.per

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"CantorWord({cantor_word_text(self)!r})"


def cantor_word_text(w: CantorWord) -> str:
    return "".join(str(x) for x in w.pre) + "(" + "".join(str(x) for x in w.per) + ")"


def parse_cantor_word(s: str) -> CantorWord:
    body = s.strip()
    if "(" not in body or not body.endswith(")"):
        raise ValueError(f"bad point text {s!r}; expected pre(period)")
    head, _, tail = body.partition("(")
    per = tail[:-1]
    if not per:
        raise ValueError(f"empty period in {s!r}")
    return CantorWord(tuple(int(c) for c in head), tuple(int(c) for c in per))


def tail_equivalent(a: CantorWord, b: CantorWord) -> bool:
    """True when the two infinite words share a common suffix.

    For eventually periodic words this holds exactly when the primitive
    periods are rotations of each other.
    """
    if len(a.per) != len(b.per):
        return False
    doubled = a.per + a.per
    return any(
        doubled[i : i + len(b.per)] == b.per for i in range(len(a.per))
    )


# ---------------------------------------------------------------------------
# self-similar automaton elements
# ---------------------------------------------------------------------------

class Automaton:
    """A finite-state transducer over {1..d}.

    Each state carries an output permutation of the alphabet and one
    successor state per letter.  Transitions must stay inside the state set,
    so the generated group is closed under taking sections by construction.
    """

    __slots__ = ("d", "states", "_hash")

    def __init__(self, d: int, states: dict):
        if d < 2:
            raise ValueError("arity must be >= 2")
        frozen = {}
        for name, (rho, delta) in states.items():
            rho = tuple(rho)
            delta = tuple(delta)
            if sorted(rho) != list(range(1, d + 1)):
                raise ValueError(f"state {name!r}: output is not a permutation")
            if len(delta) != d or any(t not in states for t in delta):
                raise ValueError(f"state {name!r}: transitions leave the state set")
            frozen[name] = (rho, delta)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "states", frozen)
        object.__setattr__(
            self, "_hash", hash((d, tuple(sorted((k, v) for k, v in frozen.items()))))
        )

    def __setattr__(self, name, value):
        raise AttributeError("Automaton is immutable")

    def is_trivial_state(self, name) -> bool:
        rho, delta = self.states[name]
        return rho == perm_identity(self.d) and all(t == name for t in delta)

    def __eq__(self, other):
        if not isinstance(other, Automaton):
            return NotImplemented
        return self.d == other.d and self.states == other.states

    def __hash__(self):
        return self._hash


# a word entry is (automaton, state name, sign); sign -1 means the inverse
Entry = tuple[Automaton, str, int]


class AutomatonElement:
    """A product of automaton states (and their inverses), leftmost applied last.

    The word representation makes composition and inversion free; sections
    are computed entrywise by the wreath recursion, and identity testing
    explores the finitely many reachable section words exactly.
    """

    __slots__ = ("d", "word", "_hash")

    def __init__(self, d: int, word: Iterable[Entry] = ()):
        simplified: list[Entry] = []
        for entry in word:
            machine, name, sign = entry
            if machine.d != d:
                raise ValueError("arity mismatch in automaton word")
            if machine.is_trivial_state(name):
                continue
            if simplified:
                pm, pn, ps = simplified[-1]
                if pm == machine and pn == name and ps == -sign:
                    simplified.pop()
                    continue
            simplified.append((machine, name, sign))
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "word", tuple(simplified))
        object.__setattr__(
            self,
            "_hash",
            hash((d, tuple((hash(m), n, s) for m, n, s in self.word))),
        )

    def __setattr__(self, name, value):
        raise AttributeError("AutomatonElement is immutable")

    def is_trivial_word(self) -> bool:
        return not self.word

    def step(self, letter: int) -> tuple[int, "AutomatonElement"]:
        """One level of the wreath recursion: output letter and section."""
        if not 1 <= letter <= self.d:
            raise ValueError(f"letter {letter} out of range 1..{self.d}")
        out = letter
        new_word: list[Entry] = []
        for machine, name, sign in reversed(self.word):
            rho, delta = machine.states[name]
            if sign > 0:
                nxt = delta[out - 1]
                out = rho[out - 1]
            else:
                j = rho.index(out) + 1
                nxt = delta[j - 1]
                out = j
            new_word.append((machine, nxt, sign))
        new_word.reverse()
        return out, AutomatonElement(self.d, new_word)

    def apply_finite(self, word: Word) -> tuple[Word, "AutomatonElement"]:
        """Image of a finite word together with the section below it."""
        out: list[int] = []
        cur = self
        for letter in word:
            o, cur = cur.step(letter)
            out.append(o)
        return tuple(out), cur

    def root_perm(self) -> tuple[int, ...]:
        return tuple(self.step(i)[0] for i in range(1, self.d + 1))

    def __mul__(self, other: "AutomatonElement") -> "AutomatonElement":
        """Product: other acts first."""
        if self.d != other.d:
            raise ValueError("arity mismatch")
        return AutomatonElement(self.d, self.word + other.word)

    def inv(self) -> "AutomatonElement":
        return AutomatonElement(
            self.d, tuple((m, n, -s) for m, n, s in reversed(self.word))
        )

    def __eq__(self, other):
        """Syntactic equality of words; use equals() for semantic equality."""
        if not isinstance(other, AutomatonElement):
            return NotImplemented
        return self.d == other.d and self.word == other.word

    def __hash__(self):
        return self._hash

    def is_identity(self, max_nodes: int = 100000) -> bool:
        """Exact identity test by exploring all reachable sections."""
        seen = {self.word}
        frontier = [self]
        while frontier:
            cur = frontier.pop()
            for i in range(1, cur.d + 1):
                out, sec = cur.step(i)
                if out != i:
                    return False
                if sec.word not in seen:
                    seen.add(sec.word)
                    if len(seen) > max_nodes:
                        raise UnsupportedError(
                            "identity test exceeded the section budget"
                        )
                    frontier.append(sec)
        return True

    def equals(self, other: "AutomatonElement", max_nodes: int = 100000) -> bool:
        return (self * other.inv()).is_identity(max_nodes=max_nodes)

    def __repr__(self):
        return f"AutomatonElement({automaton_element_text(self)!r})"


def identity_element(d: int) -> AutomatonElement:
    return AutomatonElement(d)


def automaton_element_text(e: AutomatonElement) -> str:
    if not e.word:
        return "id"
    return " ".join(
        name if sign > 0 else f"{name}^-1" for _, name, sign in e.word
    )


def full_reflection(d: int) -> AutomatonElement:
    """The order-reversing automorphism: flips letters at every level."""
    machine = Automaton(
        d, {"h0": (tuple(range(d, 0, -1)), ("h0",) * d)}
    )
    return AutomatonElement(d, ((machine, "h0", 1),))


# ---------------------------------------------------------------------------
# prefix-exchange maps
# ---------------------------------------------------------------------------

Rule = tuple[Word, Word, AutomatonElement]


def _is_complete_prefix_code(words: list[Word], d: int) -> bool:
    if len(words) == 1:
        return words[0] == ()
    if any(not w for w in words):
        return False
    for a in range(1, d + 1):
        bucket = [w[1:] for w in words if w[0] == a]
        if not bucket or not _is_complete_prefix_code(bucket, d):
            return False
    return True


class PrefixMap:
    """A homeomorphism given by finitely many cone-to-cone rules.

    Rule (u, v, s) sends the point u.x to v.s(x).  The domain words and the
    range words each form a complete prefix code, so every point matches
    exactly one rule on each side.
    """

    __slots__ = ("d", "rules")

    def __init__(self, d: int, rules: Iterable[Rule]):
        rules = tuple(sorted(rules, key=lambda r: r[0]))
        if not rules:
            raise ValueError("a prefix map needs at least one rule")
        doms = [r[0] for r in rules]
        rngs = [r[1] for r in rules]
        if not _is_complete_prefix_code(doms, d):
            raise ValueError("domain words do not form a complete prefix code")
        if not _is_complete_prefix_code(sorted(rngs), d):
            raise ValueError("range words do not form a complete prefix code")
        for _, _, s in rules:
            if s.d != d:
                raise ValueError("state arity mismatch")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "rules", rules)

    def __setattr__(self, name, value):
        raise AttributeError("PrefixMap is immutable")

    @classmethod
    def identity(cls, d: int) -> "PrefixMap":
        return cls(d, (((), (), identity_element(d)),))

    def rule_for(self, point: CantorWord) -> Rule:
        for rule in self.rules:
            if point.prefix(len(rule[0])) == rule[0]:
                return rule
        raise AssertionError("complete prefix code failed to match")

    def apply(self, point: CantorWord) -> CantorWord:
        """Image of an eventually periodic point; exact via cycle detection."""
        dom, rng, state = self.rule_for(point)
        tail = point.drop(len(dom))
        out_pre: list[int] = []
        cur = state
        for letter in tail.pre:
            o, cur = cur.step(letter)
            out_pre.append(o)
        seen: dict[tuple, int] = {}
        outs: list[int] = []
        idx = 0
        while True:
            key = (cur.word, idx % len(tail.per))
            if key in seen:
                start = seen[key]
                break
            seen[key] = idx
            o, cur = cur.step(tail.per[idx % len(tail.per)])
            outs.append(o)
            idx += 1
        pre = rng + tuple(out_pre) + tuple(outs[:start])
        return CantorWord(pre, tuple(outs[start:]))

    def compose(self, other: "PrefixMap") -> "PrefixMap":
        """The product self . other (other acts first)."""
        if self.d != other.d:
            raise ValueError("arity mismatch")
        d = self.d
        out: list[Rule] = []
        stack = list(other.rules)
        while stack:
            u, v, s = stack.pop()
            hit = None
            for w_plus, w_minus, t in self.rules:
                if v[: len(w_plus)] == w_plus:
                    hit = (w_plus, w_minus, t)
                    break
            if hit is None:
                for a in range(1, d + 1):
                    o, sec = s.step(a)
                    stack.append((u + (a,), v + (o,), sec))
                continue
            w_plus, w_minus, t = hit
            rest = v[len(w_plus) :]
            out_rest, t_section = t.apply_finite(rest)
            out.append((u, w_minus + out_rest, t_section * s))
        return PrefixMap(d, _normalize_rules(out, d))

    def __mul__(self, other: "PrefixMap") -> "PrefixMap":
        return self.compose(other)

    def invert(self) -> "PrefixMap":
        return PrefixMap(
            self.d,
            _normalize_rules([(v, u, s.inv()) for u, v, s in self.rules], self.d),
        )

    def normalize(self) -> "PrefixMap":
        """Canonical table: merge sibling rules that expand a single rule."""
        return PrefixMap(self.d, _normalize_rules(list(self.rules), self.d))

    def refine_to(self, domain_words: list[Word]) -> list[Rule]:
        """Rewrite the table over a finer complete domain code."""
        out: list[Rule] = []
        for w in domain_words:
            for u, v, s in self.rules:
                if w[: len(u)] == u:
                    image, section = s.apply_finite(w[len(u) :])
                    out.append((w, v + image, section))
                    break
            else:
                raise ValueError("refinement words do not refine the domain code")
        return out

    def equals(self, other: "PrefixMap") -> bool:
        """Semantic equality: same action on every point."""
        if self.d != other.d:
            return False
        words = _common_refinement(
            [r[0] for r in self.rules], [r[0] for r in other.rules], self.d
        )
        mine = self.refine_to(words)
        theirs = other.refine_to(words)
        for (_, v1, s1), (_, v2, s2) in zip(mine, theirs):
            if v1 != v2 or not s1.equals(s2):
                return False
        return True

    def is_identity(self) -> bool:
        return self.equals(PrefixMap.identity(self.d))

    def __repr__(self):
        return f"PrefixMap({rule_table_text(self)!r})"


def _common_refinement(code1: list[Word], code2: list[Word], d: int) -> list[Word]:
    """Leaves of the union of the two code trees, in lexicographic order."""
    prefixes = set()
    for w in list(code1) + list(code2):
        for i in range(len(w)):
            prefixes.add(w[:i])
    out: list[Word] = []

    def walk(w: Word) -> None:
        if w in prefixes:
            for a in range(1, d + 1):
                walk(w + (a,))
        else:
            out.append(w)

    walk(())
    return out


def _normalize_rules(rules: list[Rule], d: int) -> list[Rule]:
    """Merge sibling rules that are the entry-expansion of a single rule.

    Candidates for the merged state are the identity and the signed single
    states occurring in the sibling rules; this recovers canonical tables
    after compose/invert without searching arbitrary products.
    """
    rules = sorted(rules, key=lambda r: r[0])
    changed = True
    while changed:
        changed = False
        by_parent: dict[Word, list[Rule]] = {}
        for rule in rules:
            if rule[0]:
                by_parent.setdefault(rule[0][:-1], []).append(rule)
        for parent, group in by_parent.items():
            if len(group) != d:
                continue
            group = sorted(group, key=lambda r: r[0])
            if [r[0][-1] for r in group] != list(range(1, d + 1)):
                continue
            if any(not r[1] for r in group):
                continue
            v = group[0][1][:-1]
            if any(r[1][:-1] != v for r in group):
                continue
            last = [r[1][-1] for r in group]
            merged = _try_merge(group, v, last, d)
            if merged is not None:
                rules = [r for r in rules if not (r[0] and r[0][:-1] == parent)]
                rules.append((parent, v, merged))
                rules.sort(key=lambda r: r[0])
                changed = True
                break
    return rules


def _try_merge(
    group: list[Rule], v: Word, last: list[int], d: int
) -> Optional[AutomatonElement]:
    ident = identity_element(d)
    candidates: list[AutomatonElement] = [ident]
    seen_entries = set()
    for _, _, s in group:
        for machine, name, _ in s.word:
            if (id(machine), name) not in seen_entries:
                seen_entries.add((id(machine), name))
                candidates.append(AutomatonElement(d, ((machine, name, 1),)))
                candidates.append(AutomatonElement(d, ((machine, name, -1),)))
    for cand in candidates:
        if cand.root_perm() != tuple(last):
            continue
        ok = True
        for a, (_, _, s_a) in enumerate(group, start=1):
            _, section = cand.step(a)
            if not section.equals(s_a):
                ok = False
                break
        if ok:
            return cand
    return None


def rule_table_text(f: PrefixMap) -> str:
    lines = []
    for u, v, s in f.rules:
        du = "".join(str(x) for x in u) or "e"
        dv = "".join(str(x) for x in v) or "e"
        lines.append(f"{du} -> {dv} [{automaton_element_text(s)}]")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# bridges to the tree-pair model
# ---------------------------------------------------------------------------

def from_tree_pair(x: Element) -> PrefixMap:
    """The prefix map of a tree-pair element of a permutation-type system.

    The right tree subdivides the domain, the left tree the range: the cone
    at leaf i of U maps onto the cone at leaf rho(g)(i) of T, with trivial
    automaton part.
    """
    if not x.sys.permutation_type:
        raise UnsupportedError(
            f"{x.sys.name} middles are not leaf permutations; no prefix-map form"
        )
    d = x.sys.d
    sigma = x.sys.rho(x.n, x.g)
    dom = leaf_words(x.U)
    rng = leaf_words(x.T)
    ident = identity_element(d)
    rules = [
        (dom[i - 1], rng[perm_apply(sigma, i) - 1], ident) for i in range(1, x.n + 1)
    ]
    return PrefixMap(d, _normalize_rules(rules, d))


def is_order_preserving(f: PrefixMap) -> bool:
    """True when f preserves the lexicographic order on the Cantor space.

    This holds exactly when every state acts trivially and the range words
    appear in the same order as the domain words; such maps are precisely
    the F_d elements.
    """
    if any(not s.is_identity() for _, _, s in f.rules):
        return False
    rngs = [v for _, v, _ in f.rules]
    return all(a < b for a, b in zip(rngs, rngs[1:]))


def tail_equivalence_violations(
    f: PrefixMap, points: Iterable[CantorWord]
) -> list[CantorWord]:
    """Points whose image has a different infinite tail.

    Any nonempty answer certifies that f lies outside V_d, whose elements
    only ever edit a finite prefix.
    """
    return [p for p in points if not tail_equivalent(p, f.apply(p))]
