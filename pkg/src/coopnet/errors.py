"""Exception hierarchy shared by all coopnet modules."""


class CoopnetError(Exception):
    """Base class for all coopnet domain errors."""


class UnknownGoodType(CoopnetError):
    pass


class UnknownCompany(CoopnetError):
    pass


class DomainError(CoopnetError):
    """A goods vector lies outside the domain of a benefit function."""


class InvalidGame(CoopnetError):
    def __init__(self, defects):
        super().__init__(f"game has {len(defects)} defect(s): " + "; ".join(map(str, defects)))
        self.defects = list(defects)


class InvalidStartFlow(CoopnetError):
    pass


class NoSurplus(CoopnetError):
    """The improved flow does not strictly increase total network value."""


class BadWeights(CoopnetError):
    pass


class TargetSumMismatch(CoopnetError):
    pass


class IdenticalNodes(CoopnetError):
    pass


class CollapseNotRepresentable(CoopnetError):
    """The merged node has no external goods flow but a positive external
    cost, which no cost spec with ect(0, 0) = 0 can reproduce."""


class ConstraintViolation(CoopnetError):
    pass


class ScenarioError(CoopnetError):
    pass


class ParseError(ScenarioError):
    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class SemanticError(ScenarioError):
    pass


class VersionError(ScenarioError):
    pass
