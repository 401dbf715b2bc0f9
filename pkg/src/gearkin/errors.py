"""Exception hierarchy shared by all modules."""


class GearkinError(Exception):
    """Base class for every error this package raises on bad input."""
