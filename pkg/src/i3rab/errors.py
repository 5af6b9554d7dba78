"""Exception hierarchy shared across the toolkit."""


class I3rabError(Exception):
    """Base class for all domain errors raised by this package."""


# conllx
class MalformedRow(I3rabError):
    pass


class IdGap(I3rabError):
    pass


class HeadOutOfRange(I3rabError):
    pass


class DuplicateKey(I3rabError):
    pass


class MalformedPair(I3rabError):
    pass


# schema
class UnknownSection(I3rabError):
    pass


class DuplicateEntry(I3rabError):
    pass


class AliasTargetMissing(I3rabError):
    pass


class Unclassifiable(I3rabError):
    pass


# converter
class NoCovertMapping(I3rabError):
    pass


class RestructureFailure(I3rabError):
    pass


class OverrideIndexOutOfRange(I3rabError):
    pass


class InvalidOverride(I3rabError):
    pass


# parser
class NonProjectiveInput(I3rabError):
    pass


class IllegalTransition(I3rabError):
    pass


class EmptyTreebank(I3rabError):
    pass


class AllSentencesNonProjective(I3rabError):
    pass


class SchemaMismatch(I3rabError):
    pass


class ModelFormatError(I3rabError):
    pass


# eval
class TokenMismatch(I3rabError):
    pass


class KTooLarge(I3rabError):
    pass


class ZeroVariance(I3rabError):
    pass


class LengthMismatch(I3rabError):
    pass


class ZeroBase(I3rabError):
    pass
