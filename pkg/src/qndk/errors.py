"""Exception types shared across the simulator."""


class QndkError(Exception):
    """Base class for all package errors."""


class DeadQubitError(QndkError):
    """Operation attempted on a consumed, lost, or discarded qubit."""


class GroupSizeError(QndkError):
    """Merging would exceed the entanglement-group size cap."""


class GateError(QndkError):
    """Unknown gate name or wrong number of targets."""


class MemoryFullError(QndkError):
    """No free slot in a node's quantum memory."""


class QubitNotStoredError(QndkError):
    """Retrieval of a qubit that is not in the memory."""


class NoConnectionError(QndkError):
    """No connection exists between the two nodes."""


class DuplicateRoleError(QndkError):
    """A role name was registered twice."""


class UnknownRoleError(QndkError):
    """A role name is not present in the registry."""


class RoleAborted(QndkError):
    """Raised inside a role to terminate it with status 'aborted'."""


class EventDispatchError(QndkError):
    """An event handler raised; carries the event's identity."""

    def __init__(self, sequence: int, fire_time: float, message: str):
        super().__init__(f"event #{sequence} at t={fire_time}: {message}")
        self.sequence = sequence
        self.fire_time = fire_time


class DocumentError(QndkError):
    """A document failed validation or import."""

    def __init__(self, errors):
        self.errors = list(errors)
        summary = "; ".join(f"{e.code} at {e.path}" for e in self.errors)
        super().__init__(f"invalid document: {summary}")


class UnknownEngineError(QndkError):
    """Document names an engine absent from the backend registry."""


class CapabilityError(QndkError):
    """Backend lacks capabilities the document requires."""

    def __init__(self, engine: str, missing):
        self.engine = engine
        self.missing = sorted(missing)
        super().__init__(f"engine '{engine}' lacks: {', '.join(self.missing)}")
