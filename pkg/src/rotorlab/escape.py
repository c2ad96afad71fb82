"""Escape-sequence calculus for the ternary tree.

A binary word records, chip by chip, whether the walk returns to the origin
(0) or escapes to infinity (1).  Words realizable on a single branch are
exactly those in which every window of length 2^k - 1 carries at most
2^{k-1} ones, for every k; on the full tree the condition applies to each of
the three residue subsequences.  The constructive direction synthesizes a
rotor configuration for any valid word by peeling the word into the two
sub-branch words through the block maps psi and phi.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from rotorlab.lazytree import (
    Address,
    LazyTreeConfig,
    LevelRegion,
    run_chips_infinite,
)


class WordError(ValueError):
    pass


class ThreeConsecutiveOnesError(WordError):
    pass


class LengthMismatchError(WordError):
    pass


class NotRealizableError(WordError):
    pass


def validate_word(a: str) -> str:
    if any(ch not in "01" for ch in a):
        raise WordError(f"not a binary word: {a!r}")
    return a


def satisfies_pk(a: str, k: int) -> bool:
    """Every window of length 2^k - 1 contains at most 2^{k-1} ones.

    Words shorter than the window length satisfy the condition vacuously;
    k = 1 always holds.
    """
    validate_word(a)
    if k < 1:
        raise WordError("k must be at least 1")
    w = 2 ** k - 1
    limit = 2 ** (k - 1)
    if len(a) < w:
        return True
    ones = a[:w].count("1")
    if ones > limit:
        return False
    for i in range(w, len(a)):
        ones += (a[i] == "1") - (a[i - w] == "1")
        if ones > limit:
            return False
    return True


def satisfies_all(a: str) -> bool:
    k = 2
    while 2 ** k - 1 <= len(a):
        if not satisfies_pk(a, k):
            return False
        k += 1
    return True


def violating_window(a: str) -> tuple[int, int, int] | None:
    """(k, start, end) of the first failing window, 1-based inclusive."""
    k = 2
    while 2 ** k - 1 <= len(a):
        w = 2 ** k - 1
        limit = 2 ** (k - 1)
        for i in range(len(a) - w + 1):
            if a[i:i + w].count("1") > limit:
                return (k, i + 1, i + w)
        k += 1
    return None


@dataclass(frozen=True)
class BlockFactorization:
    blocks: tuple[str, ...]
    appended_zero: bool

    def joined(self) -> str:
        return "".join(self.blocks)


def factor_blocks(a: str) -> BlockFactorization:
    """Greedy factorization into blocks {0, 10, 110}.

    Blocks are self-delimiting (each ends at its first 0), so the
    factorization is unique; a dangling 1 or 11 at the end is closed by
    appending a single 0.
    """
    validate_word(a)
    blocks: list[str] = []
    run = 0
    for ch in a:
        if ch == "1":
            run += 1
            if run > 2:
                raise ThreeConsecutiveOnesError(
                    "words with three consecutive ones are not factorable")
        else:
            blocks.append("1" * run + "0")
            run = 0
    appended = run > 0
    if appended:
        blocks.append("1" * run + "0")
    return BlockFactorization(tuple(blocks), appended)


def psi(a: str) -> tuple[str, str]:
    """Split a branch word into the two sub-branch words, blockwise.

    Block 0 maps to (0,0), block 110 to (1,1), and the 10 blocks alternate
    (1,0), (0,1), (1,0), ... in order of appearance.
    """
    fact = factor_blocks(a)
    c: list[str] = []
    d: list[str] = []
    tens = 0
    for b in fact.blocks:
        if b == "0":
            c.append("0")
            d.append("0")
        elif b == "110":
            c.append("1")
            d.append("1")
        else:
            if tens % 2 == 0:
                c.append("1")
                d.append("0")
            else:
                c.append("0")
                d.append("1")
            tens += 1
    return "".join(c), "".join(d)


def phi(c: str, d: str) -> str:
    """Left inverse of psi: merge two sub-branch words into the branch word."""
    validate_word(c)
    validate_word(d)
    if len(c) != len(d):
        raise LengthMismatchError("phi needs words of equal length")
    out: list[str] = []
    for cj, dj in zip(c, d):
        if cj == "0" and dj == "0":
            out.append("0")
        elif cj == "1" and dj == "1":
            out.append("110")
        else:
            out.append("10")
    return "".join(out)


def extend_for_root(c: str, d: str, root: str) -> tuple[str, str]:
    """Extended sub-branch words when the root rotor is not pointing up."""
    if root == "up":
        return c, d
    if root == "left":
        return "0" + c, d
    if root == "right":
        return "0" + c, "0" + d
    raise WordError(f"unknown root direction {root!r}")


def is_escape_branch(a: str) -> bool:
    """Is the word realizable as an escape sequence on a single branch?"""
    validate_word(a)
    return satisfies_all(a)


def residues(a: str) -> tuple[str, str, str]:
    return a[0::3], a[1::3], a[2::3]


def is_escape_tree(a: str) -> bool:
    """Is the word realizable on the full ternary tree?

    Chips cycle through the three principal branches, so the word is
    realizable exactly when each residue subsequence is a branch word.
    """
    validate_word(a)
    return all(satisfies_all(r) for r in residues(a))


# -- configuration descriptors ------------------------------------------------

@dataclass(frozen=True)
class ConfigDescriptor:
    """Finite recursive description of a branch rotor configuration.

    kind "level": the first h levels of the branch point in direction d-1
    and everything deeper points in direction d.  kind "node": the branch
    root points up and the two sub-branches carry their own descriptors.
    """

    kind: str                     # "level" | "node"
    h: int = 0
    left: "ConfigDescriptor | None" = None
    right: "ConfigDescriptor | None" = None

    @staticmethod
    def level(h: int) -> "ConfigDescriptor":
        if h < 0:
            raise WordError("level rule height must be nonnegative")
        return ConfigDescriptor("level", h=h)

    @staticmethod
    def node(left: "ConfigDescriptor", right: "ConfigDescriptor",
             ) -> "ConfigDescriptor":
        return ConfigDescriptor("node", left=left, right=right)

    def to_json_dict(self) -> dict:
        if self.kind == "level":
            return {"rule": "level", "h": self.h}
        return {"rule": "node", "root": "up",
                "left": self.left.to_json_dict(),
                "right": self.right.to_json_dict()}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def from_json_dict(p: dict) -> "ConfigDescriptor":
        if p["rule"] == "level":
            return ConfigDescriptor.level(p["h"])
        if p["rule"] == "node":
            return ConfigDescriptor.node(
                ConfigDescriptor.from_json_dict(p["left"]),
                ConfigDescriptor.from_json_dict(p["right"]))
        raise WordError(f"unknown descriptor rule {p.get('rule')!r}")

    @staticmethod
    def from_json(text: str) -> "ConfigDescriptor":
        return ConfigDescriptor.from_json_dict(json.loads(text))


def _degenerate_height(a: str) -> int | None:
    """h when a is all zeros possibly ending in a single 1, else None."""
    body = a[:-1] if a.endswith("1") else a
    if all(ch == "0" for ch in body):
        return len(body)
    return None


def synthesize_branch(a: str) -> ConfigDescriptor:
    """A descriptor whose branch simulation reproduces the word exactly.

    Valid words split through psi into strictly shorter valid sub-words
    until the all-zero tail case, which a level rule realizes directly.
    """
    validate_word(a)
    if not is_escape_branch(a):
        raise NotRealizableError(f"{a!r} violates a window condition")
    h = _degenerate_height(a)
    if h is not None:
        return ConfigDescriptor.level(h)
    c, d = psi(a)
    return ConfigDescriptor.node(synthesize_branch(c), synthesize_branch(d))


def expand_descriptor(desc: ConfigDescriptor, base: Address,
                      overrides: list[tuple[Address, int]],
                      regions: list[LevelRegion], d: int = 3) -> None:
    if desc.kind == "level":
        regions.append(LevelRegion(base, desc.h))
    else:
        overrides.append((base, d))
        expand_descriptor(desc.left, base + (1,), overrides, regions, d)
        expand_descriptor(desc.right, base + (2,), overrides, regions, d)


def descriptor_to_branch_config(desc: ConfigDescriptor,
                                d: int = 3) -> LazyTreeConfig:
    """Expand a descriptor into a branch-mode lazy configuration."""
    overrides: list[tuple[Address, int]] = []
    regions: list[LevelRegion] = []
    expand_descriptor(desc, (1,), overrides, regions, d)
    return LazyTreeConfig(d=d, default=d, mode="branch",
                          overrides=tuple(overrides), regions=tuple(regions))


def synthesize_tree(a: str) -> LazyTreeConfig:
    """A full-tree configuration realizing the word.

    The origin rotor starts at direction 3, so chip j enters branch
    j mod 3 (j = 1 entering branch 1); each branch carries the descriptor
    synthesized for its residue subsequence.
    """
    validate_word(a)
    if not is_escape_tree(a):
        raise NotRealizableError(f"{a!r} has an invalid residue subsequence")
    overrides: list[tuple[Address, int]] = [((), 3)]
    regions: list[LevelRegion] = []
    for j, r in enumerate(residues(a), start=1):
        desc = synthesize_branch(r)
        expand_descriptor(desc, (j,), overrides, regions, 3)
    return LazyTreeConfig(d=3, default=3, mode="tree",
                          overrides=tuple(overrides), regions=tuple(regions))


def simulate_branch(desc: ConfigDescriptor, m: int, d: int = 3) -> str:
    """Realized escape word of a descriptor for m chips."""
    cfg = descriptor_to_branch_config(desc, d)
    return run_chips_infinite(cfg, m).word


def simulate_config(cfg: LazyTreeConfig, m: int) -> str:
    return run_chips_infinite(cfg, m).word
