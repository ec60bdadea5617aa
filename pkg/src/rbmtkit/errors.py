"""Exception hierarchy shared by all toolkit modules.

Two families exist because the command line maps them to different exit
codes: :class:`ValidationError` (bad data, exit 1) and :class:`ContractError`
(mismatched files or a misbehaving external tool, exit 2).
"""


class ToolkitError(Exception):
    exit_code = 1


class ValidationError(ToolkitError):
    exit_code = 1


class ContractError(ToolkitError):
    exit_code = 2


# corpus
class EmptySurface(ValidationError):
    pass


class SeparatorCollision(ValidationError):
    pass


class RaggedFeatures(ValidationError):
    pass


class MalformedPair(ValidationError):
    pass


class LineCountMismatch(ContractError):
    pass


# lexicon / trees
class LexiconSyntaxError(ValidationError):
    pass


class UnbalancedParens(LexiconSyntaxError):
    pass


class MissingSurface(LexiconSyntaxError):
    pass


class MissingCategory(LexiconSyntaxError):
    pass


class MissingField(ValidationError):
    pass


class EmptyNode(ValidationError):
    pass


class LengthMismatch(ContractError):
    pass


# entity
class OverlappingSpans(ValidationError):
    pass


class SpanOutOfBounds(ValidationError):
    pass


class ReservedTagCollision(ValidationError):
    pass


class InvalidAttention(ValidationError):
    pass


class DimensionMismatch(ContractError):
    pass


class SidecarMismatch(ContractError):
    pass


# metrics
class EmptyCorpus(ValidationError):
    pass


class EmptyReference(ValidationError):
    pass


# pipeline
class TranslatorLineMismatch(ContractError):
    pass


class TranslatorTimeout(ContractError):
    pass
