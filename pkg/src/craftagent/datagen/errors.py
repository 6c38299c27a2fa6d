"""Dataset generation errors."""


class DatagenError(Exception):
    """Base class for dataset generation errors."""


class SectionTooLarge(DatagenError):
    def __init__(self, heading: str, words: int, limit: int):
        super().__init__(f"section {heading!r} has {words} words, over the limit of {limit}")
        self.heading = heading


class NoPairsFound(DatagenError):
    """No complete prompt/response block in a generation reply."""


class NoQuestionsFound(DatagenError):
    """No valid multiple-choice record in a reply."""


class UnknownQAType(DatagenError):
    """qa_type is not one of short, long, bool, normal."""
