"""Exception hierarchy shared across the package."""


class LinkbootError(Exception):
    """Base class for all package errors."""


class EmptyGraph(LinkbootError, ValueError):
    pass


class NotDirected(LinkbootError, ValueError):
    pass


class NotUndirected(LinkbootError, ValueError):
    pass


class NoEdges(LinkbootError, ValueError):
    pass


class NodeNotFound(LinkbootError, KeyError):
    pass


class NoTriples(LinkbootError, ValueError):
    pass


class KindMismatch(LinkbootError, ValueError):
    pass


class GenerationFailed(LinkbootError, RuntimeError):
    pass


class BadProbability(LinkbootError, ValueError):
    pass


class BadMoments(LinkbootError, ValueError):
    pass


class DanglingMapping(LinkbootError, KeyError):
    pass


class BadBinDomain(LinkbootError, ValueError):
    pass


class InputParseError(LinkbootError, ValueError):
    """Malformed input file; carries the offending path and 1-based line."""

    def __init__(self, path, lineno, message):
        self.path = str(path)
        self.lineno = lineno
        self.message = message
        super().__init__(f"{self.path}:{lineno}: {message}")
