"""Exception types raised across the package."""


class NicgraphError(Exception):
    """Base class for all errors raised by nicgraph."""


class MalformedLine(NicgraphError):
    """A text input line could not be parsed."""

    def __init__(self, path, line_no, reason):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = str(path)
        self.line_no = line_no
        self.reason = reason


class MissingLabel(NicgraphError):
    """A node id appears in the edge data but carries no label assignment."""

    def __init__(self, node_id):
        super().__init__(f"no label for node {node_id}")
        self.node_id = int(node_id)


class DuplicateLabel(NicgraphError):
    """A node id is labeled more than once with conflicting values."""

    def __init__(self, node_id, values):
        super().__init__(f"conflicting labels for node {node_id}: {sorted(values)}")
        self.node_id = int(node_id)
        self.values = tuple(values)


class FormatMismatch(NicgraphError):
    """Input files do not follow the expected layout."""


class EmptyGraph(NicgraphError):
    """The operation needs a nonempty graph (nodes and/or edges)."""


class DegenerateMixing(NicgraphError):
    """Every edge joins the same ordered class pair; assortativity is undefined."""


class ModelInvalid(NicgraphError):
    """A label model fails probability normalization or sign constraints."""


class EnumerationTooLarge(NicgraphError):
    """Exact enumeration would exceed the configured cap."""

    def __init__(self, estimated, cap):
        super().__init__(
            f"enumeration of ~{estimated} configurations exceeds cap {cap}"
        )
        self.estimated = int(estimated)
        self.cap = int(cap)


class ModelIncomplete(NicgraphError):
    """The sampler needs distributions the model does not define."""


class InfeasibleTarget(NicgraphError):
    """Homophily calibration could not reach the requested level."""


class DimensionMismatch(NicgraphError):
    """Class counts or feature dimensions of two inputs disagree."""


class MethodUnsupported(NicgraphError):
    """The requested computation method cannot handle this input."""


class DegenerateInput(NicgraphError):
    """Statistic undefined for this input (e.g. zero variance)."""
