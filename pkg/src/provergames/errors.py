"""Exceptions shared across the package."""

from __future__ import annotations


class GameError(Exception):
    """Base class for all package errors."""


class StructureError(GameError):
    """A game tree violates a structural precondition of an operation."""


class UnknownHistoryError(GameError):
    """A history does not exist in the game tree."""


class ProfileError(GameError):
    """A strategy profile is not total or names unknown sets/actions."""


class BeliefError(GameError):
    """A belief is not a probability distribution over the right support."""


class ImperfectRecallError(StructureError):
    """An operation that requires perfect recall got a game without it."""


class CapExceededError(GameError):
    """A configured work cap (profile count, node count, ...) was exceeded."""

    def __init__(self, message: str, count: int):
        super().__init__(message)
        self.count = count


class GameFileError(GameError):
    """A game/strategy document is malformed; carries location context."""
