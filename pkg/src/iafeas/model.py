"""System descriptions for K-user MIMO interference networks.

A network is a list of users, each a (transmit antennas, receive
antennas, streams) triple.  The text form ``(MxN,d)`` with an optional
``^r`` repeat suffix mirrors the usual notation for these networks,
e.g. ``"(2x3,1)^4"`` or ``"(5x5,3)(5x5,2)^3"``.  This module owns the
grammar: every command-line entry point and every ``"system"`` JSON
field uses exactly this format.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

__all__ = [
    "UserConfig",
    "SystemSpec",
    "SymmetricSpec",
    "Violation",
    "SpecSyntaxError",
    "parse_system",
    "format_system",
    "validate",
]


class SpecSyntaxError(ValueError):
    """A system description string that does not match the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.message = message
        self.position = position


@dataclass(frozen=True)
class UserConfig:
    """Antenna counts and stream demand of one transmit/receive pair."""

    tx_antennas: int
    rx_antennas: int
    dof: int

    def max_streams(self) -> int:
        """Largest stream count this antenna pair can carry."""
        return min(self.tx_antennas, self.rx_antennas)


@dataclass(frozen=True)
class SystemSpec:
    """An ordered list of users forming an interference network.

    Construction is permissive: entries that over-demand streams are
    representable so that :func:`validate` can report them.
    """

    users: tuple[UserConfig, ...]

    def __post_init__(self):
        users = tuple(self.users)
        if not users:
            raise ValueError("a system needs at least one user")
        object.__setattr__(self, "users", users)

    @property
    def num_users(self) -> int:
        return len(self.users)

    def total_dof(self) -> int:
        return sum(u.dof for u in self.users)

    def as_symmetric(self) -> SymmetricSpec | None:
        """Collapse to a SymmetricSpec, or None if users differ."""
        first = self.users[0]
        if any(u != first for u in self.users):
            return None
        return SymmetricSpec(
            first.tx_antennas, first.rx_antennas, first.dof, len(self.users)
        )

    def __str__(self) -> str:
        return format_system(self)


@dataclass(frozen=True)
class SymmetricSpec:
    """A network whose users all share one antenna/stream configuration."""

    tx_antennas: int
    rx_antennas: int
    dof: int
    num_users: int

    def expand(self) -> SystemSpec:
        user = UserConfig(self.tx_antennas, self.rx_antennas, self.dof)
        return SystemSpec((user,) * self.num_users)

    def __str__(self) -> str:
        return format_system(self.expand())


def parse_system(text: str) -> SystemSpec:
    """Parse a system description such as ``"(5x5,3)(5x5,2)^3"``.

    Groups are ``(MxN,d)`` with an optional ``^r`` repeat suffix;
    whitespace may separate groups and the ``x`` is case-insensitive.
    All counts must be positive.  Raises :class:`SpecSyntaxError`
    carrying the offending character position on malformed input.
    """
    users: list[UserConfig] = []
    n = len(text)

    def skip_ws(p: int) -> int:
        while p < n and text[p].isspace():
            p += 1
        return p

    def expect(p: int, ch: str) -> int:
        if p >= n or text[p] != ch:
            raise SpecSyntaxError(f"expected '{ch}'", p)
        return p + 1

    def number(p: int, what: str) -> tuple[int, int]:
        start = p
        while p < n and text[p].isdigit():
            p += 1
        if p == start:
            raise SpecSyntaxError(f"expected {what}", start)
        value = int(text[start:p])
        if value == 0:
            raise SpecSyntaxError(f"{what} must be positive", start)
        return value, p

    pos = skip_ws(0)
    if pos == n:
        raise SpecSyntaxError("expected '('", pos)
    while pos < n:
        pos = expect(pos, "(")
        tx, pos = number(pos, "transmit antenna count")
        if pos >= n or text[pos] not in "xX":
            raise SpecSyntaxError("expected 'x'", pos)
        rx, pos = number(pos + 1, "receive antenna count")
        pos = expect(pos, ",")
        dof, pos = number(pos, "stream count")
        pos = expect(pos, ")")
        repeat = 1
        if pos < n and text[pos] == "^":
            repeat, pos = number(pos + 1, "repeat count")
        users.extend([UserConfig(tx, rx, dof)] * repeat)
        pos = skip_ws(pos)
    return SystemSpec(tuple(users))


def format_system(spec: SystemSpec) -> str:
    """Canonical text form; adjacent identical users collapse to ``^r``."""
    parts = []
    for user, group in itertools.groupby(spec.users):
        run = len(list(group))
        text = f"({user.tx_antennas}x{user.rx_antennas},{user.dof})"
        parts.append(text if run == 1 else f"{text}^{run}")
    return "".join(parts)


@dataclass(frozen=True)
class Violation:
    """One invalid user entry found by :func:`validate`."""

    user: int
    reason: str


def validate(spec: SystemSpec) -> list[Violation]:
    """Check every user for positivity and dof <= min(tx, rx).

    Returns a list of violations; an empty list means the spec is a
    valid network.
    """
    problems = []
    for i, u in enumerate(spec.users):
        if u.tx_antennas < 1 or u.rx_antennas < 1 or u.dof < 1:
            problems.append(
                Violation(i, "antenna and stream counts must be positive")
            )
        elif u.dof > u.max_streams():
            problems.append(
                Violation(
                    i,
                    f"demands {u.dof} streams but the antenna pair "
                    f"supports at most {u.max_streams()}",
                )
            )
    return problems
