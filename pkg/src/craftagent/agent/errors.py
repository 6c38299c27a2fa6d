class AgentError(Exception):
    pass


class MissingField(AgentError):
    pass


class ParseFailed(AgentError):
    pass


class FormatViolation(AgentError):
    pass


class ChoiceNotInCandidates(AgentError):
    pass


class NotAPermutation(AgentError):
    pass


class BackendError(AgentError):
    pass


class TransportError(BackendError):
    pass


class BadStatus(BackendError):
    def __init__(self, status: int, message: str = ""):
        super().__init__(message or f"backend returned HTTP {status}")
        self.status = status


class EmptyCompletion(BackendError):
    pass
