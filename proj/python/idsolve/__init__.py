from ._idsolve import Diagram, IdsolveError, expected_value, solve

__all__ = ["Diagram", "IdsolveError", "expected_value", "solve"]
