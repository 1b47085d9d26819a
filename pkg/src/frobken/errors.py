"""Exception hierarchy.

Every error carries a stable machine-readable ``code`` that the CLI renders
into its JSON error documents.
"""


class FrobkenError(Exception):
    code = "error"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        doc = {"code": self.code, "message": str(self)}
        if self.details:
            doc["details"] = self.details
        return doc


class NotFullDimensional(FrobkenError):
    code = "not_full_dimensional"


class NotPointed(FrobkenError):
    code = "not_pointed"


class InfiniteIndex(FrobkenError):
    code = "infinite_index"


class RankDeficient(FrobkenError):
    code = "rank_deficient"


class BoxExhausted(FrobkenError):
    code = "box_exhausted"


class MissingShift(FrobkenError):
    code = "missing_shift"


class ConeMismatch(FrobkenError):
    code = "cone_mismatch"


class DuplicateClass(FrobkenError):
    code = "duplicate_class"


class NotEquivalent(FrobkenError):
    code = "not_equivalent"


class CapExceeded(FrobkenError):
    code = "cap_exceeded"


class WildGroupOrder(FrobkenError):
    code = "wild_group_order"


class NotFSteady(FrobkenError):
    code = "not_f_steady"


class NotACover(FrobkenError):
    code = "not_a_cover"


class ParseError(FrobkenError):
    code = "parse_error"


class ValidationError(FrobkenError):
    code = "validation_error"

    def __init__(self, message="", pointer="", **details):
        super().__init__(message, pointer=pointer, **details)
        self.pointer = pointer


class CatalogCorrupt(FrobkenError):
    code = "catalog_corrupt"
