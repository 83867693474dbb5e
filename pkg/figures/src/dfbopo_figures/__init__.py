"""Figure rendering for dfbopo CSV outputs (pure CSV consumers, no physics)."""

from .render import FigureRecipe, SchemaError, render

__all__ = ["FigureRecipe", "SchemaError", "render"]
