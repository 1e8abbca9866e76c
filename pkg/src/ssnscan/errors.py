"""Exception hierarchy.

Everything raised on bad input or contract violation derives from
:class:`SSNScanError`, so callers (and the CLI) can distinguish validation
failures (exit code 1) from I/O failures (OSError, exit code 2).
"""


class SSNScanError(Exception):
    """Base class for all validation and contract errors."""


class DuplicateNodeId(SSNScanError):
    pass


class DanglingEdge(SSNScanError):
    pass


class SelfLoop(SSNScanError):
    pass


class DegenerateNetwork(SSNScanError):
    pass


class UnknownNode(SSNScanError):
    pass


class InsufficientNodes(SSNScanError):
    pass


class SpecMismatch(SSNScanError):
    pass


class EmptySpecList(SSNScanError):
    pass


class MixedNetworks(SSNScanError):
    pass


class TooFewSpecs(SSNScanError):
    pass


class EmptyParams(SSNScanError):
    pass


class NodeOutsideGrid(SSNScanError):
    pass


class GridMismatch(SSNScanError):
    pass


class TooManyEdges(SSNScanError):
    pass


class NonRealizable(SSNScanError):
    """Degree sequence cannot be realized as a simple graph.

    Rewiring starts from an existing simple graph, which is its own
    realization, so this is only raised on direct misuse of the swap driver.
    """


class ParseError(SSNScanError):
    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class InvalidSpec(SSNScanError):
    pass
