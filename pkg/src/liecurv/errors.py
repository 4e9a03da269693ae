"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI and the
document loader can report failures without parsing messages.
"""


class LiecurvError(ValueError):
    code = "E_INPUT"

    def __init__(self, message, code=None, location=None):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.location = location

    def to_dict(self):
        out = {"code": self.code, "message": str(self)}
        if self.location is not None:
            out["location"] = self.location
        return out


class DimensionError(LiecurvError):
    code = "E_DIMENSION"


class DegenerateFormError(LiecurvError):
    code = "E_DEGENERATE_FORM"


class NotPositiveDefiniteError(LiecurvError):
    code = "E_NOT_SPD"


class NotUnimodularError(LiecurvError):
    code = "E_NOT_UNIMODULAR"


class FamilyConstraintError(LiecurvError):
    code = "E_FAMILY_CONSTRAINT"


class DocumentError(LiecurvError):
    code = "E_DOCUMENT"
