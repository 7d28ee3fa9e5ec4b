"""Exception types raised across the package."""


class OdecoError(ValueError):
    """Base class; every error here signals bad input or an unmet hypothesis."""


class DegenerateForm(OdecoError):
    pass


class NotOrthogonal(OdecoError):
    def __init__(self, i: int, j: int):
        super().__init__(f"vectors {i} and {j} are not orthogonal")
        self.pair = (i, j)


class ZeroParameter(OdecoError):
    pass


class NotAssociative(OdecoError):
    pass


class NotDiagonalisable(OdecoError):
    pass


class RandomSearchExhausted(OdecoError):
    pass


class NotUnital(OdecoError):
    pass


class NotLocal(OdecoError):
    pass


class SocleTooBig(OdecoError):
    pass


class DegenerateCatalecticant(OdecoError):
    pass
