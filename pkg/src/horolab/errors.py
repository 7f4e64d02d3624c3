"""Exception hierarchy shared by all horolab modules."""


class HorolabError(Exception):
    """Base class for library errors."""


class DimensionError(HorolabError, ValueError):
    pass


class NotInteriorError(HorolabError, ValueError):
    pass


class InadmissibleSchemeError(HorolabError, ValueError):
    pass


class PreconditionError(HorolabError, ValueError):
    pass


class GridResolutionError(HorolabError, ValueError):
    pass


class ConvergenceError(HorolabError, RuntimeError):
    pass


class BranchCutError(HorolabError, ValueError):
    pass
