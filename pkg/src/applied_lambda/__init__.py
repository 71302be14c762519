"""Applied lambda calculi: rewriting, strict semantics, stratification and System F certificates."""

__version__ = "0.1.0"
